#pragma once

#include "symid/manifold.hpp"

namespace symid {

// Skew-symmetric solution of L1(X) + 2 L0(X) + beta = 0 with
//   L0(X) = A X A^-1 + A^-1 X A - 2X,
//   L1(X) = S X + X S,  S = B B^T + C^T C.
struct SkewSolveReport {
    Matrix X;
    double residual_norm = 0.0;
    // 2-norm condition number of the operator restricted to Skew(n).
    double operator_condition = 1.0;
};

// beta = 2 sk(2 A^-1 a + b B^T + c^T C) for eta = (a, b, c).
Matrix build_beta(const SystemTriple& x, const TangentTriple& eta);

// Dense solve in the orthonormal basis (e_i e_j^T - e_j e_i^T)/sqrt(2), i < j.
// Throws SolverError when the restricted operator has condition number
// above 1e12, i.e. when
//   dim(Ker(lambda I - A) ∩ Ker B^T ∩ Ker C) <= 1 for all lambda
// fails numerically and the projection is not unique.
SkewSolveReport solve_skew(const SystemTriple& x, const Matrix& beta);

// Matrix of L1 + 2 L0 restricted to Skew(n) in the basis above (d x d, d = n(n-1)/2).
Matrix skew_operator_matrix(const SystemTriple& x);

// Vertical vector generated by the skew matrix Omega:
// (-Omega A + A Omega, -Omega B, C Omega).
TangentTriple vertical_vector(const SystemTriple& x, const Matrix& omega);

// Residual of the horizontal condition sk(2 A' A^-1 + B B'^T + C^T C') in Frobenius norm.
double horizontal_residual(const SystemTriple& x, const TangentTriple& eta);

struct ProjectionResult {
    TangentTriple eta;
    SkewSolveReport solve;
};

// Orthogonal projection onto the horizontal space: eta + (XA - AX, XB, -CX).
ProjectionResult horizontal_project_report(const SystemTriple& x, const TangentTriple& eta);
TangentTriple horizontal_project(const SystemTriple& x, const TangentTriple& eta);

}  // namespace symid
