#pragma once

#include "symid/lti_model.hpp"
#include "symid/manifold.hpp"
#include "symid/subspace_init.hpp"

#include <random>

namespace testing {

using namespace symid;

inline Matrix gaussian(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
            M(i, j) = g(rng);
        }
    }
    return M;
}

inline Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
    return OrthogonalMatrix::from_qr(gaussian(n, n, rng)).matrix();
}

// Q diag(lambda) Q^T with lambda uniform in [lo, hi].
inline Matrix random_spd(Eigen::Index n, Rng& rng, double lo = 0.2, double hi = 0.9) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector l(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        l(i) = u(rng);
    }
    const Matrix Q = random_orthogonal(n, rng);
    return sym(Q * l.asDiagonal() * Q.transpose());
}

inline SystemTriple random_point(Eigen::Index n, Eigen::Index m, Eigen::Index p, Rng& rng) {
    return SystemTriple(random_spd(n, rng), gaussian(n, m, rng), gaussian(p, n, rng));
}

inline SystemTriple random_diag_point(Eigen::Index n, Eigen::Index m, Eigen::Index p, Rng& rng) {
    std::uniform_real_distribution<double> u(0.2, 0.9);
    Matrix A = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = u(rng);
    }
    return SystemTriple(A, gaussian(n, m, rng), gaussian(p, n, rng), PointKind::DiagPos);
}

inline TangentTriple random_tangent(const SystemTriple& x, Rng& rng) {
    TangentTriple t{sym(gaussian(x.n(), x.n(), rng)), gaussian(x.n(), x.m(), rng), gaussian(x.p(), x.n(), rng)};
    if (x.kind() == PointKind::DiagPos) {
        t.a = Matrix(t.a.diagonal().asDiagonal());
    }
    return t;
}

// Outputs of a perturbed copy of truth plus noise, so that the residual is nonzero.
inline IODataset random_dataset(const SystemTriple& truth, Eigen::Index K, Rng& rng, double noise = 0.1) {
    IODataset d;
    d.u = gaussian(truth.m(), K + 1, rng);
    d.y = simulate(truth, d.u).y + gaussian(truth.p(), K + 1, rng, noise);
    d.h = 0.1;
    return d;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

}  // namespace testing
