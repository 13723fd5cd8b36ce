#pragma once

#include "symid/linalg.hpp"

namespace symid {

// Plain (A, B, C) realization of x_{k+1} = A x_k + B u_k, y_k = C x_k.
// No structural constraint on A; used by simulation and by the
// unconstrained Gauss-Newton baseline.
struct Realization {
    Matrix A;
    Matrix B;
    Matrix C;

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index m() const { return B.cols(); }
    Eigen::Index p() const { return C.rows(); }

    // Throws DimensionError unless A is n x n, B is n x m and C is p x n.
    void check_dims() const;
};

enum class PointKind { Spd, DiagPos };

// A point of M = Sym+(n) x R^{n x m} x R^{p x n} (kind Spd) or of
// Diag+(n) x R^{n x m} x R^{p x n} (kind DiagPos).
//
// A is stored exactly symmetric (resp. exactly diagonal). Construction
// validates the kind invariant and throws DomainError on violation.
class SystemTriple {
public:
    SystemTriple(Matrix A, Matrix B, Matrix C, PointKind kind = PointKind::Spd);

    // Skips the numerical eigenvalue test. For callers that build A from a
    // spectral form Q diag(lambda) Q^T with lambda > 0 known analytically
    // (exact discretization of stiff benchmark systems), where roundoff can
    // push the smallest computed eigenvalue below the validity threshold.
    static SystemTriple from_spectral(Matrix A, Matrix B, Matrix C);

    const Matrix& A() const { return r_.A; }
    const Matrix& B() const { return r_.B; }
    const Matrix& C() const { return r_.C; }
    PointKind kind() const { return kind_; }
    const Realization& realization() const { return r_; }
    operator const Realization&() const { return r_; }

    Eigen::Index n() const { return r_.n(); }
    Eigen::Index m() const { return r_.m(); }
    Eigen::Index p() const { return r_.p(); }

private:
    SystemTriple() = default;
    Realization r_;
    PointKind kind_ = PointKind::Spd;
};

// Tangent vector (xi_A, xi_B, xi_C). Also used for search directions.
struct TangentTriple {
    Matrix a;
    Matrix b;
    Matrix c;

    static TangentTriple zeros_like(const SystemTriple& x);

    TangentTriple& operator+=(const TangentTriple& o);
    TangentTriple& operator-=(const TangentTriple& o);
    TangentTriple& operator*=(double s);
};

TangentTriple operator+(TangentTriple x, const TangentTriple& y);
TangentTriple operator-(TangentTriple x, const TangentTriple& y);
TangentTriple operator*(double s, TangentTriple x);
TangentTriple operator-(TangentTriple x);

// Euclidean gradient (G_A, G_B, G_C) of the prediction-error objective.
struct GradientTriple {
    Matrix ga;
    Matrix gb;
    Matrix gc;
};

// U with ||U^T U - I||_F <= 1e-12.
class OrthogonalMatrix {
public:
    explicit OrthogonalMatrix(Matrix U);
    // Q factor of a Householder QR of M, signs fixed so diag(R) >= 0.
    static OrthogonalMatrix from_qr(const Matrix& M);

    const Matrix& matrix() const { return U_; }

private:
    Matrix U_;
};

// <xi, zeta>_Theta = tr(A^-1 xi_A A^-1 zeta_A) + tr(xi_B^T zeta_B) + tr(xi_C^T zeta_C).
double metric(const SystemTriple& x, const TangentTriple& xi, const TangentTriple& zeta);
double norm(const SystemTriple& x, const TangentTriple& xi);

// Exponential map. Spd: A^{1/2} exp(A^{-1/2} xi_A A^{-1/2}) A^{1/2};
// DiagPos: a_i exp(xi_i / a_i). B and C move linearly.
// Throws DomainError when the result is not a valid point numerically
// (exp overflow, or eigenvalues below the SPD threshold after a very long step).
SystemTriple exp_map(const SystemTriple& x, const TangentTriple& xi);

// Whether the candidate (A, B, C) is finite and satisfies the kind invariant.
bool is_valid_point(const Matrix& A, PointKind kind);

// Parallel transport along the geodesic from x1 to x2:
// xi_A -> E xi_A E^T with E = (A2 A1^-1)^{1/2}; xi_B, xi_C unchanged.
TangentTriple parallel_transport(const SystemTriple& x1, const SystemTriple& x2, const TangentTriple& xi);

// Spd: (A sym(G_A) A, G_B, G_C). DiagPos: (A^2 diag(G_A), G_B, G_C).
TangentTriple egrad_to_rgrad(const SystemTriple& x, const GradientTriple& g);

// U o Theta = (U^T A U, U^T B, C U).
SystemTriple group_action(const OrthogonalMatrix& U, const SystemTriple& x);

// D phi_U(Theta)[xi] = (U^T xi_A U, U^T xi_B, xi_C U).
TangentTriple tangent_action(const OrthogonalMatrix& U, const TangentTriple& xi);

}  // namespace symid
