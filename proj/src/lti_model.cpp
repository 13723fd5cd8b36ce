#include "symid/lti_model.hpp"

#include "symid/errors.hpp"

namespace symid {

void IODataset::validate() const {
    if (u.cols() != y.cols()) {
        throw DimensionError("dataset: input and output sequences differ in length");
    }
    if (u.cols() < 2) {
        throw DataError("dataset: need at least two samples");
    }
    if (!(h > 0.0)) {
        throw DataError("dataset: sampling interval must be positive");
    }
    if (y_clean && (y_clean->rows() != y.rows() || y_clean->cols() != y.cols())) {
        throw DimensionError("dataset: clean outputs must match outputs in shape");
    }
}

namespace {

void check_compatible(const Realization& sys, const IODataset& data) {
    sys.check_dims();
    data.validate();
    if (data.m() != sys.m() || data.p() != sys.p()) {
        throw DimensionError("model and dataset disagree on input/output dimensions");
    }
}

}  // namespace

Simulation simulate(const Realization& sys, const Matrix& u, const Vector& x0) {
    sys.check_dims();
    if (u.rows() != sys.m()) {
        throw DimensionError("simulate: input has wrong dimension");
    }
    const Eigen::Index n = sys.n();
    const Eigen::Index N = u.cols();
    Simulation out{Matrix(n, N), Matrix()};
    if (x0.size() == 0) {
        out.x.col(0).setZero();
    } else if (x0.size() != n) {
        throw DimensionError("simulate: initial state has wrong dimension");
    } else {
        out.x.col(0) = x0;
    }
    for (Eigen::Index k = 0; k + 1 < N; ++k) {
        out.x.col(k + 1).noalias() = sys.A * out.x.col(k) + sys.B * u.col(k);
    }
    out.y.noalias() = sys.C * out.x;
    return out;
}

ObjectiveValue objective(const Realization& sys, const IODataset& data) {
    check_compatible(sys, data);
    const Simulation sim = simulate(sys, data.u);
    const Eigen::Index K = data.K();
    const Matrix r = data.y.rightCols(K) - sim.y.rightCols(K);
    ObjectiveValue out;
    out.e = Eigen::Map<const Vector>(r.data(), r.size());
    out.f = out.e.squaredNorm();
    return out;
}

ValueAndGradient objective_and_gradient(const Realization& sys, const IODataset& data) {
    check_compatible(sys, data);
    const Eigen::Index n = sys.n();
    const Eigen::Index K = data.K();
    const Simulation sim = simulate(sys, data.u);
    const Matrix r = data.y - sim.y;  // column 0 is unused

    // Gamma.col(i) = gamma(i) = C^T r_{K-i} + A^T gamma(i-1); A^T = A on the manifold.
    Matrix gamma(n, K);
    const Matrix Ct = sys.C.transpose();
    const Matrix At = sys.A.transpose();
    gamma.col(0).noalias() = Ct * r.col(K);
    for (Eigen::Index i = 1; i < K; ++i) {
        gamma.col(i).noalias() = Ct * r.col(K - i) + At * gamma.col(i - 1);
    }
    // gamma(i) pairs with xhat_{K-i-1} and u_{K-i-1}; reversing the columns
    // of Gamma aligns it with samples 0..K-1, so the rank-one updates
    // G_A(i+1) = G_A(i) - 2 gamma(i) xhat_{K-i-1}^T collapse into one product.
    const Matrix gamma_fwd = gamma.rowwise().reverse();
    ValueAndGradient out;
    out.f = r.rightCols(K).squaredNorm();
    out.g.ga.noalias() = -2.0 * gamma_fwd * sim.x.leftCols(K).transpose();
    out.g.gb.noalias() = -2.0 * gamma_fwd * data.u.leftCols(K).transpose();
    out.g.gc.noalias() = -2.0 * r.rightCols(K) * sim.x.rightCols(K).transpose();
    return out;
}

GradientTriple euclid_gradient(const Realization& sys, const IODataset& data) {
    return objective_and_gradient(sys, data).g;
}

Matrix output_dderiv(const Realization& sys, const TangentTriple& xi, const IODataset& data) {
    check_compatible(sys, data);
    const Eigen::Index n = sys.n();
    if (xi.a.rows() != n || xi.a.cols() != n || xi.b.rows() != n || xi.b.cols() != sys.m() ||
        xi.c.rows() != sys.p() || xi.c.cols() != n) {
        throw DimensionError("output_dderiv: direction has wrong shape");
    }
    const Eigen::Index K = data.K();
    const Simulation sim = simulate(sys, data.u);
    // s_{k+1} = A s_k + xi_A xhat_k + xi_B u_k, s_0 = 0
    Matrix s(n, K + 1);
    s.col(0).setZero();
    const Matrix drive = xi.a * sim.x.leftCols(K) + xi.b * data.u.leftCols(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        s.col(k + 1).noalias() = sys.A * s.col(k) + drive.col(k);
    }
    return sys.C * s.rightCols(K) + xi.c * sim.x.rightCols(K);
}

Matrix markov_parameters(const Realization& sys, int count) {
    sys.check_dims();
    Matrix out(count * sys.p(), sys.m());
    Matrix AkB = sys.B;
    for (int k = 0; k < count; ++k) {
        out.middleRows(k * sys.p(), sys.p()) = sys.C * AkB;
        AkB = sys.A * AkB;
    }
    return out;
}

}  // namespace symid
