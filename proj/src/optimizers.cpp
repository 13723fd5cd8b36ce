#include "symid/optimizers.hpp"

#include "symid/errors.hpp"
#include "symid/quotient.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace symid {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Cg1: return "CG1";
        case Variant::Cg2: return "CG2";
        case Variant::Cg3: return "CG3";
        case Variant::Sd: return "SD";
        case Variant::Hybrid: return "HYBRID";
        case Variant::Gn: return "GN";
    }
    return "?";
}

Variant parse_variant(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Variant v : {Variant::Cg1, Variant::Cg2, Variant::Cg3, Variant::Sd, Variant::Hybrid, Variant::Gn}) {
        if (to_string(v) == u) {
            return v;
        }
    }
    throw std::invalid_argument("unknown variant '" + s + "' (expected CG1, CG2, CG3, SD, HYBRID or GN)");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::MaxIterations: return "max_iterations";
        case Termination::GradientTolerance: return "gradient_tolerance";
        case Termination::LineSearchFailed: return "line_search_failed";
        case Termination::NonFinite: return "non_finite";
    }
    return "?";
}

void OptConfig::validate() const {
    if (!(armijo.c1 > 0.0 && armijo.c1 < 1.0)) {
        throw std::invalid_argument("armijo c1 must lie in (0, 1)");
    }
    if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) {
        throw std::invalid_argument("armijo shrink must lie in (0, 1)");
    }
    if (!(armijo.t_init > 0.0) || armijo.max_backtracks < 0) {
        throw std::invalid_argument("armijo t_init must be positive and max_backtracks non-negative");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    if (variant == Variant::Hybrid && !(hybrid_switch >= 0 && hybrid_switch < max_iters)) {
        throw std::invalid_argument("hybrid_switch must lie in [0, max_iters)");
    }
}

SystemTriple OptTrace::final_point() const {
    if (!final_kind) {
        throw DomainError("trace: the final point is not on a manifold (unconstrained baseline)");
    }
    return SystemTriple(final.A, final.B, final.C, *final_kind);
}

TangentTriple riemannian_gradient(const SystemTriple& x, const IODataset& data, double* f_out) {
    const ValueAndGradient vg = objective_and_gradient(x, data);
    if (f_out) {
        *f_out = vg.f;
    }
    return egrad_to_rgrad(x, vg.g);
}

ArmijoResult armijo_step(const SystemTriple& x, const TangentTriple& eta, double f, double slope,
                         const IODataset& data, const ArmijoConfig& cfg) {
    ArmijoResult res;
    double t = cfg.t_init;
    for (int j = 0; j <= cfg.max_backtracks; ++j) {
        res.t = t;
        res.backtracks = j;
        std::optional<SystemTriple> cand;
        double fc = std::numeric_limits<double>::infinity();
        try {
            cand.emplace(exp_map(x, t * eta));
            fc = objective(*cand, data).f;
        } catch (const DomainError&) {
            cand.reset();
        } catch (const SolverError&) {
            cand.reset();
        }
        if (cand && std::isfinite(fc)) {
            res.next = cand;
            res.f_next = fc;
            if (fc <= f + cfg.c1 * t * slope) {
                return res;
            }
        } else {
            res.next.reset();
        }
        t *= cfg.shrink;
    }
    res.exhausted = true;
    return res;
}

double dai_yuan_beta(const SystemTriple& x_next, const TangentTriple& g_next, const TangentTriple& transported,
                     const SystemTriple& x, const TangentTriple& g, const TangentTriple& eta) {
    const double num = metric(x_next, g_next, g_next);
    const double den = metric(x_next, g_next, transported) - metric(x, g, eta);
    if (!(std::abs(den) >= 1e-300)) {
        return 0.0;
    }
    return num / den;
}

namespace {

enum class TransportRule { Parallel, Projection, None };

TransportRule rule_for(const OptConfig& cfg, int iter) {
    switch (cfg.variant) {
        case Variant::Cg1:
        case Variant::Cg3: return TransportRule::Parallel;
        case Variant::Cg2: return TransportRule::Projection;
        case Variant::Hybrid: return iter < cfg.hybrid_switch ? TransportRule::Parallel : TransportRule::Projection;
        case Variant::Sd: return TransportRule::None;
        case Variant::Gn: break;
    }
    throw std::invalid_argument("rule_for: GN has no transport");
}

// Horizontal lift of grad f2 at x. grad f1 is already horizontal (f is
// constant along the orbits), so the lift is the gradient itself.
const TangentTriple& lifted_gradient(const TangentTriple& g) { return g; }

}  // namespace

OptTrace run(const SystemTriple& x0, const IODataset& data, const OptConfig& cfg) {
    cfg.validate();
    if (cfg.variant == Variant::Gn) {
        return run_gn_baseline(x0.realization(), data, cfg);
    }
    const bool diag = cfg.variant == Variant::Cg3;
    if (diag != (x0.kind() == PointKind::DiagPos)) {
        throw DomainError(diag ? "CG3 needs a DiagPos initial point" : "this variant needs an Spd initial point");
    }

    OptTrace trace;
    trace.variant = cfg.variant;
    SystemTriple x = x0;
    double f = 0.0;
    TangentTriple g = riemannian_gradient(x, data, &f);
    if (cfg.variant == Variant::Sd && cfg.quotient) {
        g = lifted_gradient(g);
    }
    double gnorm = norm(x, g);

    IterRecord rec0;
    rec0.iter = 0;
    rec0.f = f;
    rec0.grad_norm = gnorm;
    trace.records.push_back(rec0);

    auto finish = [&](Termination why) {
        trace.reason = why;
        trace.final = x.realization();
        trace.final_kind = x.kind();
        return trace;
    };

    if (!std::isfinite(f)) {
        return finish(Termination::NonFinite);
    }
    if (gnorm <= cfg.grad_tol * std::max(1.0, f)) {
        return finish(Termination::GradientTolerance);
    }

    TangentTriple eta = -g;
    for (int k = 0; k < cfg.max_iters; ++k) {
        IterRecord rec;
        rec.iter = k + 1;

        double slope = metric(x, g, eta);
        if (!(slope < 0.0)) {
            eta = -g;
            slope = -gnorm * gnorm;
            rec.descent_reset = true;
        }

        ArmijoResult ls = armijo_step(x, eta, f, slope, data, cfg.armijo);
        rec.step = ls.t;
        rec.backtracks = ls.backtracks;
        rec.line_search_exhausted = ls.exhausted;
        if (ls.exhausted && (!ls.next || !(ls.f_next < f))) {
            return finish(Termination::LineSearchFailed);
        }
        const SystemTriple x_next = *ls.next;
        if (!is_valid_point(x_next.A(), x_next.kind())) {
            trace.all_iterates_valid = false;
        }

        double f_next = 0.0;
        TangentTriple g_next = riemannian_gradient(x_next, data, &f_next);
        if (cfg.variant == Variant::Sd && cfg.quotient) {
            g_next = lifted_gradient(g_next);
        }
        const double gnorm_next = norm(x_next, g_next);

        TangentTriple eta_next;
        const TransportRule tr = rule_for(cfg, k);
        if (tr == TransportRule::None) {
            eta_next = -g_next;
        } else {
            TangentTriple moved;
            if (tr == TransportRule::Projection) {
                try {
                    ProjectionResult pr = horizontal_project_report(x_next, eta);
                    rec.projection_condition = pr.solve.operator_condition;
                    moved = std::move(pr.eta);
                } catch (const SolverError&) {
                    rec.transport_fallback = true;
                    moved = parallel_transport(x, x_next, eta);
                }
            } else {
                moved = parallel_transport(x, x_next, eta);
            }
            const double beta = dai_yuan_beta(x_next, g_next, moved, x, g, eta);
            rec.beta = beta;
            eta_next = -g_next + beta * moved;
        }

        x = x_next;
        f = f_next;
        g = std::move(g_next);
        gnorm = gnorm_next;
        eta = std::move(eta_next);
        rec.f = f;
        rec.grad_norm = gnorm;
        trace.records.push_back(rec);

        if (!std::isfinite(f)) {
            return finish(Termination::NonFinite);
        }
        if (gnorm <= cfg.grad_tol * std::max(1.0, f)) {
            return finish(Termination::GradientTolerance);
        }
    }
    return finish(Termination::MaxIterations);
}

namespace {

// Jacobian of yhat_{1..K} with respect to theta = (vec A; vec B; vec C),
// rows ordered (k-1)*p + r. The GN residual Jacobian is its negative.
Matrix output_jacobian(const Realization& sys, const IODataset& data) {
    const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p(), K = data.K();
    const Simulation sim = simulate(sys, data.u);
    Matrix J = Matrix::Zero(p * K, n * n + n * m + p * n);

    // Sensitivities to A_ij for fixed i, all j at once:
    // S_{k+1} = A S_k + e_i xhat_k^T, output C S_k.
    Matrix S(n, n), Sn(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        S.setZero();
        for (Eigen::Index k = 0; k < K; ++k) {
            Sn.noalias() = sys.A * S;
            Sn.row(i) += sim.x.col(k).transpose();
            S.swap(Sn);
            const Matrix out = sys.C * S;  // p x n, column j is direction A_ij
            for (Eigen::Index j = 0; j < n; ++j) {
                J.block(k * p, i + j * n, p, 1) = out.col(j);
            }
        }
    }
    const Eigen::Index offB = n * n;
    Matrix T(n, m), Tn(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        T.setZero();
        for (Eigen::Index k = 0; k < K; ++k) {
            Tn.noalias() = sys.A * T;
            Tn.row(i) += data.u.col(k).transpose();
            T.swap(Tn);
            const Matrix out = sys.C * T;
            for (Eigen::Index j = 0; j < m; ++j) {
                J.block(k * p, offB + i + j * n, p, 1) = out.col(j);
            }
        }
    }
    const Eigen::Index offC = offB + n * m;
    for (Eigen::Index k = 0; k < K; ++k) {
        // d yhat_k / d C_rj = e_r xhat_k(j)
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index r = 0; r < p; ++r) {
                J(k * p + r, offC + r + j * p) = sim.x(j, k + 1);
            }
        }
    }
    return J;
}

void gn_diagnostics(const Matrix& A, IterRecord& rec) {
    rec.symmetry_defect = (A - A.transpose()).norm();
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() == Eigen::Success) {
        rec.min_real_eig = es.eigenvalues().real().minCoeff();
        rec.max_imag_eig = es.eigenvalues().imag().cwiseAbs().maxCoeff();
    }
}

}  // namespace

OptTrace run_gn_baseline(const Realization& x0, const IODataset& data, const OptConfig& cfg) {
    cfg.validate();
    x0.check_dims();
    const Eigen::Index n = x0.n(), m = x0.m(), p = x0.p();
    OptTrace trace;
    trace.variant = Variant::Gn;
    Realization x = x0;

    ObjectiveValue ov = objective(x, data);
    IterRecord rec0;
    rec0.f = ov.f;
    gn_diagnostics(x.A, rec0);
    trace.records.push_back(rec0);

    auto finish = [&](Termination why) {
        trace.reason = why;
        trace.final = x;
        return trace;
    };
    if (ov.f == 0.0) {
        return finish(Termination::GradientTolerance);
    }

    for (int k = 0; k < cfg.max_iters; ++k) {
        IterRecord rec;
        rec.iter = k + 1;
        const Matrix D = output_jacobian(x, data);  // J = -D
        Matrix H = D.transpose() * D;
        const Vector rhs = D.transpose() * ov.e;  // -J^T alpha
        rec.grad_norm = 2.0 * rhs.norm();

        Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        const double lmin = es.eigenvalues().minCoeff();
        if (!(lmin > 1e-12 * lmax)) {
            const double mu = 1e-8 * H.trace() / static_cast<double>(H.rows());
            H.diagonal().array() += mu;
            rec.damped = true;
        }
        const Vector delta = H.ldlt().solve(rhs);
        if (!delta.allFinite()) {
            return finish(Termination::NonFinite);
        }

        Vector theta(n * n + n * m + p * n);
        theta << Eigen::Map<const Vector>(x.A.data(), n * n), Eigen::Map<const Vector>(x.B.data(), n * m),
            Eigen::Map<const Vector>(x.C.data(), p * n);
        auto unpack = [&](const Vector& t) {
            Realization r;
            r.A = Eigen::Map<const Matrix>(t.data(), n, n);
            r.B = Eigen::Map<const Matrix>(t.data() + n * n, n, m);
            r.C = Eigen::Map<const Matrix>(t.data() + n * n + n * m, p, n);
            return r;
        };
        // Full step unless halving was requested; then halve until the cost decreases.
        double t = 1.0;
        bool accepted = false;
        ObjectiveValue trial;
        const int tries = cfg.gn_step_halving ? cfg.armijo.max_backtracks : 0;
        for (int j = 0; j <= tries; ++j) {
            const Realization cand = unpack(theta + t * delta);
            trial = objective(cand, data);
            if (!cfg.gn_step_halving || (std::isfinite(trial.f) && trial.f < ov.f)) {
                x = cand;
                accepted = true;
                rec.backtracks = j;
                break;
            }
            t *= 0.5;
        }
        rec.step = accepted ? t : 0.0;
        if (!accepted) {
            rec.line_search_exhausted = true;
            rec.f = ov.f;
            gn_diagnostics(x.A, rec);
            trace.records.push_back(rec);
            return finish(Termination::LineSearchFailed);
        }

        ov = std::move(trial);
        rec.f = ov.f;
        gn_diagnostics(x.A, rec);
        trace.records.push_back(rec);
        if (!std::isfinite(ov.f)) {
            return finish(Termination::NonFinite);
        }
        if (ov.f == 0.0) {
            return finish(Termination::GradientTolerance);
        }
    }
    return finish(Termination::MaxIterations);
}

}  // namespace symid
