#include "symid/subspace_init.hpp"

#include "symid/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace symid {

void SubspaceConfig::validate(Eigen::Index samples) const {
    if (order < 1) {
        throw std::invalid_argument("subspace: order must be positive");
    }
    const int s = depth();
    if (s < order + 1) {
        throw std::invalid_argument("subspace: block_rows must be at least order + 1");
    }
    if (samples < 2 * s + order) {
        throw DataError("subspace: " + std::to_string(samples) + " samples are too few for block_rows " +
                        std::to_string(s) + " and order " + std::to_string(order));
    }
}

namespace {

Matrix block_hankel(const Matrix& w, int s, Eigen::Index cols) {
    const Eigen::Index r = w.rows();
    Matrix H(r * s, cols);
    for (int i = 0; i < s; ++i) {
        H.middleRows(i * r, r) = w.middleCols(i, cols);
    }
    return H;
}

// Output responses to each entry of B, i.e. the regressor matrix of
// y_k = sum_j C A^{k-1-j} B u_j, k = 1..K, against vec(B).
Matrix b_regressors(const Matrix& A, const Matrix& C, const Matrix& u) {
    const Eigen::Index n = A.rows(), m = u.rows(), p = C.rows(), K = u.cols() - 1;
    Matrix Phi(p * K, n * m);
    Matrix X(n, n), Xn(n, n);
    for (Eigen::Index l = 0; l < m; ++l) {
        X.setZero();
        for (Eigen::Index k = 0; k < K; ++k) {
            Xn.noalias() = A * X;
            Xn.diagonal().array() += u(l, k);
            X.swap(Xn);
            Phi.block(k * p, l * n, p, n).noalias() = C * X;
        }
    }
    return Phi;
}

SymEig repaired_eig(const Realization& raw, Rng& rng, bool* touched = nullptr) {
    raw.check_dims();
    SymEig e = sym_eig(sym(raw.A));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Eigenvalues that are positive only at roundoff level count as non-positive.
    const double floor = 1e-12 * std::max(1.0, e.values.maxCoeff());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        if (e.values(i) <= floor) {
            double r = 0.0;
            while (r <= 0.0) {
                r = unif(rng);
            }
            e.values(i) = 0.01 * r;
            if (touched) {
                *touched = true;
            }
        }
    }
    return e;
}

}  // namespace

Realization subspace_estimate(const IODataset& data, const SubspaceConfig& cfg) {
    data.validate();
    const Eigen::Index samples = data.u.cols();
    cfg.validate(samples);
    const int s = cfg.depth();
    const int n = cfg.order;
    const Eigen::Index m = data.m(), p = data.p();
    const Eigen::Index cols = samples - s + 1;

    Matrix W(s * (m + p), cols);
    W.topRows(s * m) = block_hankel(data.u, s, cols);
    W.bottomRows(s * p) = block_hankel(data.y, s, cols);

    // LQ of W through QR of W^T; only the triangular factor is needed.
    Eigen::HouseholderQR<Matrix> qr(W.transpose());
    const Eigen::Index rows = W.rows();
    const Eigen::Index kept = std::min(rows, cols);
    Matrix R = qr.matrixQR().topRows(kept).triangularView<Eigen::Upper>();
    const Matrix L = R.transpose();  // rows x kept
    if (kept < rows) {
        throw DataError("subspace: Hankel matrix has fewer columns than rows");
    }
    const Matrix L22 = L.block(s * m, s * m, s * p, s * p);

    Eigen::JacobiSVD<Matrix> svd(L22, Eigen::ComputeFullU);
    const Vector& sv = svd.singularValues();
    if (sv.size() < n || !(sv(0) > 0.0) || sv(n - 1) <= 1e-10 * sv(0)) {
        throw DataError("subspace: order " + std::to_string(n) + " exceeds the numerical rank of the data");
    }
    const Matrix Gam = svd.matrixU().leftCols(n) * sv.head(n).cwiseSqrt().asDiagonal();

    Realization out;
    out.C = Gam.topRows(p);
    const Matrix up = Gam.topRows(p * (s - 1));
    const Matrix down = Gam.bottomRows(p * (s - 1));
    out.A = up.colPivHouseholderQr().solve(down);

    if (cfg.b_fit == BFit::OutputError) {
        const Matrix Phi = b_regressors(out.A, out.C, data.u);
        Vector yv(p * data.K());
        for (Eigen::Index k = 1; k <= data.K(); ++k) {
            yv.segment((k - 1) * p, p) = data.y.col(k);
        }
        const Vector b = Phi.colPivHouseholderQr().solve(yv);
        out.B = Eigen::Map<const Matrix>(b.data(), n, m);
    } else {
        // U2^T Y = U2^T T U with T the block Toeplitz matrix of C A^{i-j-1} B,
        // i > j, and U2 spanning the complement of the observability range.
        const Matrix U2 = svd.matrixU().rightCols(s * p - n);
        const Matrix L11 = L.topLeftCorner(s * m, s * m);
        const Matrix L21 = L.block(s * m, 0, s * p, s * m);
        const Matrix M = U2.transpose() *
                         L11.triangularView<Eigen::Lower>().solve<Eigen::OnTheRight>(L21);
        Matrix obs = Matrix::Zero(s * p, n);
        obs.topRows(p) = out.C;
        for (int i = 1; i < s; ++i) {
            obs.middleRows(i * p, p) = obs.middleRows((i - 1) * p, p) * out.A;
        }
        const Eigen::Index r = U2.cols();
        Matrix lhs(r * s, n);
        Matrix rhs(r * s, m);
        for (int j = 0; j < s; ++j) {
            Matrix psi = Matrix::Zero(s * p, n);
            psi.bottomRows((s - j - 1) * p) = obs.topRows((s - j - 1) * p);
            lhs.middleRows(j * r, r) = U2.transpose() * psi;
            rhs.middleRows(j * r, r) = M.middleCols(j * m, m);
        }
        out.B = lhs.colPivHouseholderQr().solve(rhs);
    }
    if (!all_finite(out.A) || !all_finite(out.B) || !all_finite(out.C)) {
        throw SolverError("subspace: non-finite estimate");
    }
    return out;
}

SystemTriple repair_spd(const Realization& raw, Rng& rng) {
    bool touched = false;
    const SymEig e = repaired_eig(raw, rng, &touched);
    if (!touched) {
        return SystemTriple(sym(raw.A), raw.B, raw.C, PointKind::Spd);
    }
    const Matrix A = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    return SystemTriple(A, raw.B, raw.C, PointKind::Spd);
}

SystemTriple repair_diag(const Realization& raw, Rng& rng) {
    const SymEig e = repaired_eig(raw, rng);
    Matrix A = e.values.asDiagonal();
    return SystemTriple(A, e.vectors.transpose() * raw.B, raw.C * e.vectors, PointKind::DiagPos);
}

}  // namespace symid
