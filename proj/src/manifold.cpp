#include "symid/manifold.hpp"

#include "symid/errors.hpp"

#include <cmath>
#include <string>

namespace symid {

void Realization::check_dims() const {
    if (A.rows() != A.cols()) {
        throw DimensionError("realization: A must be square");
    }
    if (B.rows() != A.rows()) {
        throw DimensionError("realization: B must have n = " + std::to_string(A.rows()) + " rows");
    }
    if (C.cols() != A.rows()) {
        throw DimensionError("realization: C must have n = " + std::to_string(A.rows()) + " columns");
    }
}

namespace {

bool diag_positive(const Matrix& A) {
    if (A.rows() != A.cols() || !A.allFinite()) {
        return false;
    }
    Matrix off = A;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() == 0.0 && (A.diagonal().array() > 0.0).all();
}

Matrix diagonal_part(const Matrix& X) {
    Matrix D = Matrix::Zero(X.rows(), X.cols());
    D.diagonal() = X.diagonal();
    return D;
}

}  // namespace

SystemTriple::SystemTriple(Matrix A, Matrix B, Matrix C, PointKind kind)
    : r_{std::move(A), std::move(B), std::move(C)}, kind_(kind) {
    r_.check_dims();
    if (r_.n() == 0) {
        throw DimensionError("system triple: state dimension must be positive");
    }
    if (kind_ == PointKind::Spd) {
        if (!is_spd(r_.A)) {
            throw DomainError("system triple: A is not symmetric positive definite");
        }
        r_.A = sym(r_.A);
    } else {
        if (!diag_positive(r_.A)) {
            throw DomainError("system triple: A is not diagonal with positive entries");
        }
    }
    if (!r_.B.allFinite() || !r_.C.allFinite()) {
        throw DomainError("system triple: B and C must be finite");
    }
}

SystemTriple SystemTriple::from_spectral(Matrix A, Matrix B, Matrix C) {
    SystemTriple x;
    x.r_ = Realization{sym(A), std::move(B), std::move(C)};
    x.r_.check_dims();
    x.kind_ = PointKind::Spd;
    return x;
}

TangentTriple TangentTriple::zeros_like(const SystemTriple& x) {
    return {Matrix::Zero(x.n(), x.n()), Matrix::Zero(x.n(), x.m()), Matrix::Zero(x.p(), x.n())};
}

TangentTriple& TangentTriple::operator+=(const TangentTriple& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
}

TangentTriple& TangentTriple::operator-=(const TangentTriple& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    return *this;
}

TangentTriple& TangentTriple::operator*=(double s) {
    a *= s;
    b *= s;
    c *= s;
    return *this;
}

TangentTriple operator+(TangentTriple x, const TangentTriple& y) { return x += y; }
TangentTriple operator-(TangentTriple x, const TangentTriple& y) { return x -= y; }
TangentTriple operator*(double s, TangentTriple x) { return x *= s; }
TangentTriple operator-(TangentTriple x) { return x *= -1.0; }

OrthogonalMatrix::OrthogonalMatrix(Matrix U) : U_(std::move(U)) {
    if (U_.rows() != U_.cols()) {
        throw DimensionError("orthogonal matrix must be square");
    }
    const Matrix I = Matrix::Identity(U_.rows(), U_.cols());
    if ((U_.transpose() * U_ - I).norm() > 1e-12) {
        throw DomainError("matrix is not orthogonal to 1e-12");
    }
}

OrthogonalMatrix OrthogonalMatrix::from_qr(const Matrix& M) {
    Eigen::HouseholderQR<Matrix> qr(M);
    Matrix Q = qr.householderQ() * Matrix::Identity(M.rows(), M.cols());
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
        if (R(j, j) < 0.0) {
            Q.col(j) *= -1.0;
        }
    }
    return OrthogonalMatrix(std::move(Q));
}

double metric(const SystemTriple& x, const TangentTriple& xi, const TangentTriple& zeta) {
    double ga = 0.0;
    if (x.kind() == PointKind::DiagPos) {
        const Vector inv2 = x.A().diagonal().cwiseInverse().cwiseAbs2();
        ga = (inv2.array() * xi.a.diagonal().array() * zeta.a.diagonal().array()).sum();
    } else {
        Eigen::LLT<Matrix> llt(x.A());
        if (llt.info() != Eigen::Success) {
            throw DomainError("metric: A is not positive definite");
        }
        const Matrix P = llt.solve(xi.a);
        const Matrix Q = llt.solve(zeta.a);
        // tr(P Q) = sum_ij P_ij Q_ji
        ga = P.cwiseProduct(Q.transpose()).sum();
    }
    return ga + frob_inner(xi.b, zeta.b) + frob_inner(xi.c, zeta.c);
}

double norm(const SystemTriple& x, const TangentTriple& xi) {
    return std::sqrt(std::max(0.0, metric(x, xi, xi)));
}

SystemTriple exp_map(const SystemTriple& x, const TangentTriple& xi) {
    if (x.kind() == PointKind::DiagPos) {
        const Vector a = x.A().diagonal();
        const Vector d = xi.a.diagonal();
        Vector out(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            out(i) = a(i) * std::exp(d(i) / a(i));
        }
        return SystemTriple(Matrix(out.asDiagonal()), x.B() + xi.b, x.C() + xi.c, PointKind::DiagPos);
    }
    const SymEig ea = sym_eig(x.A());
    const Matrix half = sym_apply(ea, [](double l) { return std::sqrt(l); });
    const Matrix inv_half = sym_apply(ea, [](double l) { return 1.0 / std::sqrt(l); });
    const Matrix inner = sym(inv_half * xi.a * inv_half);
    const Matrix e = sym_apply(inner, [](double l) { return std::exp(l); });
    Matrix An = sym(half * e * half);
    return SystemTriple(std::move(An), x.B() + xi.b, x.C() + xi.c, PointKind::Spd);
}

bool is_valid_point(const Matrix& A, PointKind kind) {
    return kind == PointKind::Spd ? is_spd(A) : diag_positive(A);
}

TangentTriple parallel_transport(const SystemTriple& x1, const SystemTriple& x2, const TangentTriple& xi) {
    if (x1.kind() != x2.kind()) {
        throw DomainError("parallel_transport: points of different kinds");
    }
    TangentTriple out{Matrix(), xi.b, xi.c};
    if (x1.kind() == PointKind::DiagPos) {
        const Vector ratio = x2.A().diagonal().cwiseQuotient(x1.A().diagonal());
        out.a = diagonal_part(xi.a);
        out.a.diagonal() = out.a.diagonal().cwiseProduct(ratio);
        return out;
    }
    if (!is_spd(x1.A()) || !is_spd(x2.A())) {
        throw DomainError("parallel_transport: endpoints must be SPD");
    }
    // E = A1^{1/2} (A1^{-1/2} A2 A1^{-1/2})^{1/2} A1^{-1/2} equals (A2 A1^{-1})^{1/2}
    // and only needs square roots of symmetric positive matrices.
    const SymEig e1 = sym_eig(x1.A());
    const Matrix h1 = sym_apply(e1, [](double l) { return std::sqrt(l); });
    const Matrix ih1 = sym_apply(e1, [](double l) { return 1.0 / std::sqrt(l); });
    const Matrix mid = sym_apply(sym(ih1 * x2.A() * ih1), [](double l) { return std::sqrt(std::max(l, 0.0)); });
    const Matrix E = h1 * mid * ih1;
    out.a = sym(E * xi.a * E.transpose());
    return out;
}

TangentTriple egrad_to_rgrad(const SystemTriple& x, const GradientTriple& g) {
    TangentTriple out{Matrix(), g.gb, g.gc};
    if (x.kind() == PointKind::DiagPos) {
        const Vector a2 = x.A().diagonal().cwiseAbs2();
        out.a = Matrix::Zero(x.n(), x.n());
        out.a.diagonal() = a2.cwiseProduct(g.ga.diagonal());
    } else {
        out.a = sym(x.A() * sym(g.ga) * x.A());
    }
    return out;
}

SystemTriple group_action(const OrthogonalMatrix& U, const SystemTriple& x) {
    if (x.kind() != PointKind::Spd) {
        throw DomainError("group_action: defined for Spd points");
    }
    const Matrix& Um = U.matrix();
    return SystemTriple(sym(Um.transpose() * x.A() * Um), Um.transpose() * x.B(), x.C() * Um, PointKind::Spd);
}

TangentTriple tangent_action(const OrthogonalMatrix& U, const TangentTriple& xi) {
    const Matrix& Um = U.matrix();
    return {sym(Um.transpose() * xi.a * Um), Um.transpose() * xi.b, xi.c * Um};
}

}  // namespace symid
