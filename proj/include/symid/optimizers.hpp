#pragma once

#include "symid/lti_model.hpp"
#include "symid/manifold.hpp"

#include <optional>
#include <string>
#include <vector>

namespace symid {

enum class Variant { Cg1, Cg2, Cg3, Sd, Hybrid, Gn };

std::string to_string(Variant v);
// Accepts CG1, CG2, CG3, SD, HYBRID, GN (case-insensitive). Throws std::invalid_argument.
Variant parse_variant(const std::string& s);

struct ArmijoConfig {
    double c1 = 1e-4;
    double shrink = 0.5;
    double t_init = 1.0;
    int max_backtracks = 50;
};

struct OptConfig {
    Variant variant = Variant::Cg1;
    int max_iters = 20;
    ArmijoConfig armijo;
    // Iterations [0, hybrid_switch) use the CG1 transport, the rest CG2.
    int hybrid_switch = 15;
    // Problem 2 formulation for SD: the gradient is taken as the horizontal
    // lift of grad f2, which coincides with grad f1.
    bool quotient = false;
    // ||grad|| <= grad_tol * max(1, f) stops the run.
    double grad_tol = 1e-8;
    unsigned long long seed = 0;
    // GN baseline only: halve the step until the cost decreases instead of
    // always taking the full step.
    bool gn_step_halving = false;

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

enum class Termination { MaxIterations, GradientTolerance, LineSearchFailed, NonFinite };
std::string to_string(Termination t);

struct IterRecord {
    int iter = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
    double beta = 0.0;
    int backtracks = 0;
    // CG2 / HYBRID: condition number of the skew operator used for the projection.
    std::optional<double> projection_condition;
    bool transport_fallback = false;    // projection failed, parallel transport used
    bool descent_reset = false;         // direction reset to -grad
    bool line_search_exhausted = false;
    bool damped = false;                // GN: Levenberg damping applied
    // GN diagnostics on the current A.
    std::optional<double> symmetry_defect;
    std::optional<double> min_real_eig;
    std::optional<double> max_imag_eig;
};

struct OptTrace {
    Variant variant = Variant::Cg1;
    std::vector<IterRecord> records;
    Realization final;
    std::optional<PointKind> final_kind;  // empty for the GN baseline
    Termination reason = Termination::MaxIterations;
    // Manifold feasibility of every iterate (CG/SD only).
    bool all_iterates_valid = true;

    double f_initial() const { return records.front().f; }
    double f_final() const { return records.back().f; }
    // Validated final point; throws DomainError if the run left the manifold.
    SystemTriple final_point() const;
};

struct ArmijoResult {
    double t = 0.0;
    std::optional<SystemTriple> next;
    double f_next = 0.0;
    int backtracks = 0;
    bool exhausted = false;
};

// Backtracking on t in {t_init * shrink^j}, j <= max_backtracks, for
// f(Exp(t eta)) <= f + c1 t <grad, eta>. Points that leave the manifold
// numerically count as rejections. On exhaustion the smallest trial is
// returned with exhausted = true (next empty when even that was invalid).
ArmijoResult armijo_step(const SystemTriple& x, const TangentTriple& eta, double f, double slope,
                         const IODataset& data, const ArmijoConfig& cfg);

// Dai-Yuan parameter
//   ||g+||^2_{+} / (<g+, T eta>_{+} - <g, eta>).
// Returns 0 when the denominator is below 1e-300 in magnitude.
double dai_yuan_beta(const SystemTriple& x_next, const TangentTriple& g_next, const TangentTriple& transported,
                     const SystemTriple& x, const TangentTriple& g, const TangentTriple& eta);

// Riemannian gradient of f at x (grad f1 for Spd points, grad f3 for DiagPos).
TangentTriple riemannian_gradient(const SystemTriple& x, const IODataset& data, double* f_out = nullptr);

// Riemannian CG / SD / Hybrid runs. GN is dispatched to run_gn_baseline.
OptTrace run(const SystemTriple& x0, const IODataset& data, const OptConfig& cfg);

// Gauss-Newton on theta = (vec A; vec B; vec C) without structure. Full steps
// unless gn_step_halving is set (then up to armijo.max_backtracks halvings).
OptTrace run_gn_baseline(const Realization& x0, const IODataset& data, const OptConfig& cfg);

}  // namespace symid
