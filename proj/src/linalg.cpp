#include "symid/linalg.hpp"

#include "symid/errors.hpp"

#include <cmath>

namespace symid {

SymEig sym_eig(const Matrix& S) {
    if (S.rows() != S.cols()) {
        throw DimensionError("sym_eig: matrix must be square");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S));
    if (es.info() != Eigen::Success) {
        throw SolverError("sym_eig: eigendecomposition did not converge");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix sym_apply(const SymEig& eig, const std::function<double(double)>& f) {
    Vector fv = eig.values.unaryExpr(f);
    Matrix out = eig.vectors * fv.asDiagonal() * eig.vectors.transpose();
    return sym(out);
}

Matrix sym_apply(const Matrix& S, const std::function<double(double)>& f) {
    return sym_apply(sym_eig(S), f);
}

bool all_finite(const Matrix& X) { return X.allFinite(); }

bool is_spd(const Matrix& S) {
    if (S.rows() != S.cols() || S.rows() == 0 || !S.allFinite()) {
        return false;
    }
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        return false;
    }
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(S.rows() - 1);
    return lmin > 1e-12 * std::max(1.0, lmax);
}

}  // namespace symid
