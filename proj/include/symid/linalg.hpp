#pragma once

#include <Eigen/Dense>

#include <functional>

namespace symid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix sym(const Matrix& X) { return 0.5 * (X + X.transpose()); }
inline Matrix skew(const Matrix& X) { return 0.5 * (X - X.transpose()); }

// tr(X^T Y), the Frobenius inner product.
inline double frob_inner(const Matrix& X, const Matrix& Y) { return X.cwiseProduct(Y).sum(); }

// Orthonormal eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymEig {
    Vector values;
    Matrix vectors;
};

SymEig sym_eig(const Matrix& S);

// Q f(Lambda) Q^T for symmetric S = Q Lambda Q^T. The result is re-symmetrized.
Matrix sym_apply(const SymEig& eig, const std::function<double(double)>& f);
Matrix sym_apply(const Matrix& S, const std::function<double(double)>& f);

// True when S is finite, symmetric to roundoff and
// lambda_min > 1e-12 * max(1, lambda_max).
bool is_spd(const Matrix& S);

bool all_finite(const Matrix& X);

}  // namespace symid
