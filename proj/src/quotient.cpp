#include "symid/quotient.hpp"

#include "symid/errors.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace symid {

namespace {

constexpr double kMaxCondition = 1e12;

std::vector<std::pair<Eigen::Index, Eigen::Index>> skew_index(Eigen::Index n) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
    idx.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            idx.emplace_back(i, j);
        }
    }
    return idx;
}

struct Operator {
    Matrix A;
    Matrix Ainv;
    Matrix S;

    explicit Operator(const SystemTriple& x)
        : A(x.A()), Ainv(x.A().llt().solve(Matrix::Identity(x.n(), x.n()))),
          S(x.B() * x.B().transpose() + x.C().transpose() * x.C()) {}

    Matrix apply(const Matrix& X) const {
        const Matrix l0 = A * X * Ainv + Ainv * X * A - 2.0 * X;
        const Matrix l1 = S * X + X * S;
        return l1 + 2.0 * l0;
    }
};

}  // namespace

Matrix build_beta(const SystemTriple& x, const TangentTriple& eta) {
    Eigen::LLT<Matrix> llt(x.A());
    if (llt.info() != Eigen::Success) {
        throw DomainError("build_beta: A is not positive definite");
    }
    const Matrix M = 2.0 * llt.solve(eta.a) + eta.b * x.B().transpose() + eta.c.transpose() * x.C();
    return 2.0 * skew(M);
}

Matrix skew_operator_matrix(const SystemTriple& x) {
    const Eigen::Index n = x.n();
    const auto idx = skew_index(n);
    const auto d = static_cast<Eigen::Index>(idx.size());
    const Operator op(x);
    const double s = 1.0 / std::sqrt(2.0);
    Matrix L(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
        Matrix E = Matrix::Zero(n, n);
        E(idx[col].first, idx[col].second) = s;
        E(idx[col].second, idx[col].first) = -s;
        const Matrix img = op.apply(E);
        // coordinate of a skew Y along basis element (i, j) is sqrt(2) Y_ij
        for (Eigen::Index row = 0; row < d; ++row) {
            const auto [i, j] = idx[row];
            L(row, col) = 0.5 * (img(i, j) - img(j, i)) / s;
        }
    }
    return L;
}

SkewSolveReport solve_skew(const SystemTriple& x, const Matrix& beta) {
    if (x.kind() != PointKind::Spd) {
        throw DomainError("solve_skew: requires an Spd point");
    }
    const Eigen::Index n = x.n();
    if (beta.rows() != n || beta.cols() != n) {
        throw DimensionError("solve_skew: beta must be n x n");
    }
    SkewSolveReport rep;
    rep.X = Matrix::Zero(n, n);
    if (n == 1) {
        return rep;
    }
    const auto idx = skew_index(n);
    const auto d = static_cast<Eigen::Index>(idx.size());
    const Matrix L = skew_operator_matrix(x);

    // L is self-adjoint and positive semidefinite on Skew(n).
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(L));
    if (es.info() != Eigen::Success) {
        throw SolverError("solve_skew: eigendecomposition of the skew operator failed");
    }
    const Vector mags = es.eigenvalues().cwiseAbs();
    const double smax = mags.maxCoeff();
    const double smin = mags.minCoeff();
    rep.operator_condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(rep.operator_condition <= kMaxCondition)) {
        throw SolverError(
            "solve_skew: skew operator is numerically singular (condition " + std::to_string(rep.operator_condition) +
            "); the eigenspace/kernel assumption dim(Ker(lambda I - A) ∩ Ker B^T ∩ Ker C) <= 1 is violated");
    }

    const double s = std::sqrt(2.0);
    Vector rhs(d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto [i, j] = idx[r];
        rhs(r) = -0.5 * (beta(i, j) - beta(j, i)) * s;
    }
    const Vector y = es.eigenvectors() * (es.eigenvectors().transpose() * rhs).cwiseQuotient(es.eigenvalues());
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto [i, j] = idx[r];
        rep.X(i, j) = y(r) / s;
        rep.X(j, i) = -y(r) / s;
    }
    const Operator op(x);
    rep.residual_norm = (op.apply(rep.X) + beta).norm();
    return rep;
}

TangentTriple vertical_vector(const SystemTriple& x, const Matrix& omega) {
    return {sym(-omega * x.A() + x.A() * omega), -omega * x.B(), x.C() * omega};
}

double horizontal_residual(const SystemTriple& x, const TangentTriple& eta) {
    Eigen::LLT<Matrix> llt(x.A());
    // A' A^-1 = (A^-1 A')^T for symmetric A, A'
    const Matrix aAinv = llt.solve(eta.a).transpose();
    return skew(2.0 * aAinv + x.B() * eta.b.transpose() + x.C().transpose() * eta.c).norm();
}

ProjectionResult horizontal_project_report(const SystemTriple& x, const TangentTriple& eta) {
    ProjectionResult out{eta, solve_skew(x, build_beta(x, eta))};
    const Matrix& X = out.solve.X;
    out.eta.a = sym(eta.a + X * x.A() - x.A() * X);
    out.eta.b = eta.b + X * x.B();
    out.eta.c = eta.c - x.C() * X;
    return out;
}

TangentTriple horizontal_project(const SystemTriple& x, const TangentTriple& eta) {
    return horizontal_project_report(x, eta).eta;
}

}  // namespace symid
