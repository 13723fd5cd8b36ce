#pragma once

#include "symid/benchmark.hpp"
#include "symid/manifold.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace symid {

using CMatrix = Eigen::MatrixXcd;

// Inverse of discretize: F = Q diag(log(lambda)/h) Q^T and
// G = (int_0^h exp(F t) dt)^-1 B. Throws DomainError unless A is
// symmetric with positive eigenvalues.
ContinuousSystem recover_continuous(const SystemTriple& x, double h);

// Solves F P + P F^T + W = 0. Spectral solve when F is symmetric.
Matrix lyapunov(const Matrix& F, const Matrix& W);
// Same equation through the n^2 x n^2 Kronecker form; any F.
Matrix lyapunov_kronecker(const Matrix& F, const Matrix& W);

// Output error system T - T_est: blockdiag(F, F_est), [G; G_est], [C, -C_est].
ContinuousSystem difference_system(const ContinuousSystem& a, const ContinuousSystem& b);

// Throws DomainError when F is not Hurwitz.
double h2_norm(const ContinuousSystem& sys);
// Certified lower bound; the true peak gain is at most (1 + 2 rel_tol) times the result.
double hinf_norm(const ContinuousSystem& sys, double rel_tol = 1e-8);
double h2_relative(const ContinuousSystem& truth, const ContinuousSystem& est);
double hinf_relative(const ContinuousSystem& truth, const ContinuousSystem& est);

// C (j omega I - F)^-1 G.
CMatrix frequency_response(const ContinuousSystem& sys, double omega);
// Largest singular value of the frequency response.
double gain(const ContinuousSystem& sys, double omega);

std::vector<double> logspace(double lo_exp, double hi_exp, int count);

struct BodeChannel {
    int output = 0;
    int input = 0;
    std::vector<double> magnitude_db;  // +inf on a pole
    std::vector<double> phase_deg;
};

struct BodeTable {
    std::vector<double> omega;
    std::vector<BodeChannel> channels;  // output-major
};

BodeTable bode_data(const ContinuousSystem& sys, const std::vector<double>& omega);

struct StabilityReport {
    bool stable = false;       // every eigenvalue of A below 1
    double lambda_max_a = 0.0;
    double lambda_max_f = 0.0;  // log(lambda_max(A)) / h
};

StabilityReport stability_report(const SystemTriple& x, double h);

struct EvalReport {
    double f_value = 0.0;
    std::optional<double> g2;    // empty for unstable estimates
    std::optional<double> g_inf;
    double lambda_max_est = 0.0;
    bool stable = false;
    double snr = 0.0;
};

EvalReport evaluate(const ContinuousSystem& truth, const SystemTriple& est, const IODataset& data, double snr);

}  // namespace symid
