#pragma once

#include "symid/manifold.hpp"

#include <optional>

namespace symid {

// Sampled input/output record. Column k of u (m x (K+1)) and y (p x (K+1))
// holds u_k and y_k, k = 0..K.
struct IODataset {
    Matrix u;
    Matrix y;
    double h = 0.1;
    std::optional<Matrix> y_clean;

    Eigen::Index K() const { return u.cols() - 1; }
    Eigen::Index m() const { return u.rows(); }
    Eigen::Index p() const { return y.rows(); }

    // Throws DimensionError/DataError on malformed data.
    void validate() const;
};

struct Simulation {
    Matrix x;  // n x (K+1)
    Matrix y;  // p x (K+1)
};

// x_{k+1} = A x_k + B u_k, y_k = C x_k, starting from x0 (zero when empty).
Simulation simulate(const Realization& sys, const Matrix& u, const Vector& x0 = Vector());

struct ObjectiveValue {
    double f = 0.0;
    Vector e;  // stacked y_k - yhat_k, k = 1..K (length pK)
};

// f = sum_{k=1}^K ||y_k - yhat_k||^2 with yhat from a zero initial state.
ObjectiveValue objective(const Realization& sys, const IODataset& data);

// Euclidean gradient (G_A, G_B, G_C) by the backward recursion
// gamma(i) = C^T r_{K-i} + A^T gamma(i-1), G_A = -2 sum_i gamma(i) xhat_{K-i-1}^T.
// O(K n^2) when m, p < n.
GradientTriple euclid_gradient(const Realization& sys, const IODataset& data);

struct ValueAndGradient {
    double f = 0.0;
    GradientTriple g;
};
ValueAndGradient objective_and_gradient(const Realization& sys, const IODataset& data);

// Directional derivatives D yhat_k [xi], k = 1..K, as columns of a p x K matrix.
// xi.a need not be symmetric.
Matrix output_dderiv(const Realization& sys, const TangentTriple& xi, const IODataset& data);

// C A^k B for k = 0..count-1, stacked vertically (count*p x m).
Matrix markov_parameters(const Realization& sys, int count);

}  // namespace symid
