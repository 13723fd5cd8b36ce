#include "symid/evaluation.hpp"

#include "symid/errors.hpp"
#include "symid/lti_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace symid {

namespace {

bool is_symmetric(const Matrix& F) { return (F - F.transpose()).norm() <= 1e-12 * std::max(1.0, F.norm()); }

double max_real_eig(const Matrix& F) {
    if (F.rows() == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (is_symmetric(F)) {
        return sym_eig(F).values.maxCoeff();
    }
    Eigen::EigenSolver<Matrix> es(F, false);
    if (es.info() != Eigen::Success) {
        throw SolverError("eigenvalue computation failed");
    }
    return es.eigenvalues().real().maxCoeff();
}

void require_hurwitz(const ContinuousSystem& sys, const char* what) {
    sys.validate();
    if (!(max_real_eig(sys.F) < 0.0)) {
        throw DomainError(std::string(what) + ": F is not Hurwitz, the norm is undefined");
    }
}

// Frequency response in the eigenbasis of a symmetric F.
struct ModalForm {
    Vector lambda;
    Matrix c;  // C Q
    Matrix g;  // Q^T G

    explicit ModalForm(const ContinuousSystem& sys) {
        const SymEig e = sym_eig(sys.F);
        lambda = e.values;
        c = sys.C * e.vectors;
        g = e.vectors.transpose() * sys.G;
    }

    double gain(double omega) const {
        const std::complex<double> jw(0.0, omega);
        Eigen::VectorXcd d(lambda.size());
        for (Eigen::Index i = 0; i < lambda.size(); ++i) {
            d(i) = 1.0 / (jw - lambda(i));
        }
        const CMatrix T = c.cast<std::complex<double>>() * d.asDiagonal() * g.cast<std::complex<double>>();
        if (T.size() == 0) {
            return 0.0;
        }
        Eigen::JacobiSVD<CMatrix> svd(T);
        return svd.singularValues()(0);
    }
};

}  // namespace

ContinuousSystem recover_continuous(const SystemTriple& x, double h) {
    if (!(h > 0.0)) {
        throw DomainError("recover_continuous: sampling interval must be positive");
    }
    const SymEig e = sym_eig(x.A());
    if (!(e.values.minCoeff() > 0.0) || !e.values.allFinite()) {
        throw DomainError("recover_continuous: A must have positive eigenvalues for a real logarithm");
    }
    ContinuousSystem out;
    out.h = h;
    out.F = sym_apply(e, [h](double l) { return std::log(l) / h; });
    const Matrix inv_int = sym_apply(e, [h](double l) {
        const double mu = std::log(l) / h;
        return 1.0 / phi(mu, h);
    });
    out.G = inv_int * x.B();
    out.C = x.C();
    return out;
}

Matrix lyapunov_kronecker(const Matrix& F, const Matrix& W) {
    const Eigen::Index n = F.rows();
    if (F.cols() != n || W.rows() != n || W.cols() != n) {
        throw DimensionError("lyapunov: shape mismatch");
    }
    const Matrix I = Matrix::Identity(n, n);
    Matrix K = Matrix::Zero(n * n, n * n);
    // vec(F P) = (I kron F) vec P, vec(P F^T) = (F kron I) vec P.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            K.block(i * n, j * n, n, n) += I(i, j) * F;
            K.block(i * n, j * n, n, n) += F(i, j) * I;
        }
    }
    Eigen::PartialPivLU<Matrix> lu(K);
    const Vector rhs = -Eigen::Map<const Vector>(W.data(), n * n);
    const Vector p = lu.solve(rhs);
    if (!p.allFinite()) {
        throw SolverError("lyapunov: singular Kronecker system");
    }
    return Eigen::Map<const Matrix>(p.data(), n, n);
}

Matrix lyapunov(const Matrix& F, const Matrix& W) {
    const Eigen::Index n = F.rows();
    if (F.cols() != n || W.rows() != n || W.cols() != n) {
        throw DimensionError("lyapunov: shape mismatch");
    }
    if (!is_symmetric(F)) {
        return lyapunov_kronecker(F, W);
    }
    const SymEig e = sym_eig(F);
    Matrix Wt = e.vectors.transpose() * W * e.vectors;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double s = e.values(i) + e.values(j);
            if (s == 0.0) {
                throw SolverError("lyapunov: F and -F share an eigenvalue");
            }
            Wt(i, j) /= -s;
        }
    }
    return e.vectors * Wt * e.vectors.transpose();
}

ContinuousSystem difference_system(const ContinuousSystem& a, const ContinuousSystem& b) {
    if (a.m() != b.m() || a.p() != b.p()) {
        throw DimensionError("difference_system: input/output dimensions differ");
    }
    const Eigen::Index n1 = a.n(), n2 = b.n();
    ContinuousSystem d;
    d.h = a.h;
    d.F = Matrix::Zero(n1 + n2, n1 + n2);
    d.F.topLeftCorner(n1, n1) = a.F;
    d.F.bottomRightCorner(n2, n2) = b.F;
    d.G.resize(n1 + n2, a.m());
    d.G << a.G, b.G;
    d.C.resize(a.p(), n1 + n2);
    d.C << a.C, -b.C;
    return d;
}

double h2_norm(const ContinuousSystem& sys) {
    require_hurwitz(sys, "h2_norm");
    const Matrix P = lyapunov(sys.F, sys.G * sys.G.transpose());
    return std::sqrt(std::max(0.0, (sys.C * P * sys.C.transpose()).trace()));
}

CMatrix frequency_response(const ContinuousSystem& sys, double omega) {
    CMatrix M = -sys.F.cast<std::complex<double>>();
    M.diagonal().array() += std::complex<double>(0.0, omega);
    Eigen::PartialPivLU<CMatrix> lu(M);
    return sys.C.cast<std::complex<double>>() * lu.solve(sys.G.cast<std::complex<double>>());
}

double gain(const ContinuousSystem& sys, double omega) {
    const CMatrix T = frequency_response(sys, omega);
    if (T.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<CMatrix> svd(T);
    return svd.singularValues()(0);
}

double hinf_norm(const ContinuousSystem& sys, double rel_tol) {
    require_hurwitz(sys, "hinf_norm");
    if (!is_symmetric(sys.F)) {
        throw DomainError("hinf_norm: F must be symmetric");
    }
    const ModalForm modal(sys);
    const Eigen::Index n = sys.n();

    // Certified lower bound from a coarse grid and the pole magnitudes.
    double lb = modal.gain(0.0);
    for (double w : logspace(-4.0, 4.0, 33)) {
        lb = std::max(lb, modal.gain(w));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        lb = std::max(lb, modal.gain(std::abs(modal.lambda(i))));
    }
    if (!(lb > 0.0)) {
        return 0.0;
    }

    const Matrix GG = sys.G * sys.G.transpose();
    const Matrix CC = sys.C.transpose() * sys.C;
    for (int it = 0; it < 200; ++it) {
        const double gamma = (1.0 + 2.0 * rel_tol) * lb;
        Matrix H(2 * n, 2 * n);
        H << sys.F, GG / gamma, -CC / gamma, -sys.F.transpose();
        Eigen::EigenSolver<Matrix> es(H, false);
        if (es.info() != Eigen::Success) {
            throw SolverError("hinf_norm: Hamiltonian eigenvalues failed");
        }
        // Near-double crossings have real parts of order sqrt(eps); extra candidates only cost gain evaluations.
        const double tol = 1e-6 * std::max(1.0, H.norm());
        std::vector<double> freqs;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const auto ev = es.eigenvalues()(i);
            if (std::abs(ev.real()) <= tol) {
                freqs.push_back(std::abs(ev.imag()));
            }
        }
        if (freqs.empty()) {
            break;
        }
        std::sort(freqs.begin(), freqs.end());
        double next = lb;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            next = std::max(next, modal.gain(freqs[i]));
            if (i + 1 < freqs.size()) {
                next = std::max(next, modal.gain(0.5 * (freqs[i] + freqs[i + 1])));
            }
        }
        if (next <= lb) {
            break;
        }
        lb = next;
    }
    return lb;
}

double h2_relative(const ContinuousSystem& truth, const ContinuousSystem& est) {
    require_hurwitz(est, "h2_relative");
    const double base = h2_norm(truth);
    if (!(base > 0.0)) {
        throw DomainError("h2_relative: true system has zero H2 norm");
    }
    return h2_norm(difference_system(truth, est)) / base;
}

double hinf_relative(const ContinuousSystem& truth, const ContinuousSystem& est) {
    require_hurwitz(est, "hinf_relative");
    const double base = hinf_norm(truth);
    if (!(base > 0.0)) {
        throw DomainError("hinf_relative: true system has zero peak gain");
    }
    return hinf_norm(difference_system(truth, est)) / base;
}

std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
    std::vector<double> out;
    if (count <= 0) {
        return out;
    }
    if (count == 1) {
        out.push_back(std::pow(10.0, lo_exp));
        return out;
    }
    for (int i = 0; i < count; ++i) {
        out.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (count - 1)));
    }
    return out;
}

BodeTable bode_data(const ContinuousSystem& sys, const std::vector<double>& omega) {
    sys.validate();
    BodeTable t;
    t.omega = omega;
    const Eigen::Index p = sys.p(), m = sys.m();
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            t.channels.push_back({static_cast<int>(i), static_cast<int>(j), {}, {}});
        }
    }
    const Vector lam = sym_eig(sys.F).values;
    for (double w : omega) {
        // A pole on the imaginary axis at this frequency.
        bool on_pole = false;
        for (Eigen::Index k = 0; k < lam.size(); ++k) {
            if (w == 0.0 && std::abs(lam(k)) <= 1e-14 * std::max(1.0, lam.cwiseAbs().maxCoeff())) {
                on_pole = true;
            }
        }
        CMatrix T;
        if (!on_pole) {
            T = frequency_response(sys, w);
        }
        for (auto& ch : t.channels) {
            if (on_pole) {
                ch.magnitude_db.push_back(std::numeric_limits<double>::infinity());
                ch.phase_deg.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            const std::complex<double> z = T(ch.output, ch.input);
            ch.magnitude_db.push_back(20.0 * std::log10(std::abs(z)));
            ch.phase_deg.push_back(std::arg(z) * 180.0 / std::numbers::pi);
        }
    }
    return t;
}

StabilityReport stability_report(const SystemTriple& x, double h) {
    const double lmax = sym_eig(x.A()).values.maxCoeff();
    StabilityReport r;
    r.lambda_max_a = lmax;
    r.stable = lmax < 1.0;
    r.lambda_max_f = std::log(lmax) / h;
    return r;
}

EvalReport evaluate(const ContinuousSystem& truth, const SystemTriple& est, const IODataset& data, double snr) {
    EvalReport r;
    r.f_value = objective(est, data).f;
    r.snr = snr;
    const StabilityReport s = stability_report(est, data.h);
    r.stable = s.stable;
    r.lambda_max_est = s.lambda_max_f;
    if (s.stable) {
        const ContinuousSystem ce = recover_continuous(est, data.h);
        r.g2 = h2_relative(truth, ce);
        r.g_inf = hinf_relative(truth, ce);
    }
    return r;
}

}  // namespace symid
