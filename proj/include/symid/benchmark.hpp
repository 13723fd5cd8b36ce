#pragma once

#include "symid/lti_model.hpp"
#include "symid/manifold.hpp"
#include "symid/subspace_init.hpp"

#include <utility>
#include <vector>

namespace symid {

// Nodes are 0-based. Each edge is stored as (lo, hi) with lo < hi.
struct UndirectedGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    int edge_count() const { return static_cast<int>(edges.size()); }
    std::vector<int> degrees() const;
    bool connected() const;
    // Throws std::invalid_argument on out-of-range, self or duplicate edges.
    void validate() const;
};

// Ring lattice with mean_degree/2 neighbours per side, each lattice edge
// rewired with probability rewire_p to a uniform non-self, non-duplicate
// target. Disconnected draws are discarded and redrawn from the same stream.
UndirectedGraph watts_strogatz(int n, int mean_degree, double rewire_p, Rng& rng);

// n x k, column j = e_lo - e_hi for edge j.
Matrix incidence(const UndirectedGraph& g);

struct RcNetworkSpec {
    Vector c_cap;   // n capacitances
    Vector r_res;   // k edge resistances
    Vector g_con;   // n conductances to ground
    Matrix g_in;    // n x m input map
    Matrix c_out;   // p x n output map

    void validate(const UndirectedGraph& g) const;
};

// C_cap = 10 rand, G_con = rand (drawn in that order), R_res = 0.1,
// input map [I_m; 0], output map [I_p 0].
RcNetworkSpec default_spec(const UndirectedGraph& g, int m, int p, Rng& rng);

// dx/dt = F x + G u, y = C x with F symmetric.
struct ContinuousSystem {
    Matrix F;
    Matrix G;
    Matrix C;
    double h = 0.1;

    Eigen::Index n() const { return F.rows(); }
    Eigen::Index m() const { return G.cols(); }
    Eigen::Index p() const { return C.rows(); }
    void validate() const;
};

// F = -C_cap^{-1/2} (B R^-1 B^T + G_con) C_cap^{-1/2}, G = C_cap^{-1/2} G_in,
// C = C_out C_cap^{1/2}.
ContinuousSystem build_system(const UndirectedGraph& g, const RcNetworkSpec& spec, double h);

// A = exp(F h), B = (int_0^h exp(F t) dt) G, both through the eigenbasis of F.
SystemTriple discretize(const ContinuousSystem& sys);

// (e^{lambda h} - 1) / lambda, equal to h at lambda = 0.
double phi(double lambda, double h);

struct NetworkConfig {
    int n = 20;
    int m = 1;
    int p = 1;
    double h = 0.1;
    int mean_degree = 10;
    double rewire_p = 0.4;
};

struct BenchmarkSystem {
    UndirectedGraph graph;
    RcNetworkSpec spec;
    ContinuousSystem continuous;
    SystemTriple discrete;
};

// Graph, then parameters, all from rng.
BenchmarkSystem make_benchmark(const NetworkConfig& cfg, Rng& rng);

struct GeneratedData {
    IODataset data;
    double snr = 0.0;  // dB; +inf when sigma2 = 0
};

// u_k ~ N(0, input_variance) per component (all inputs drawn first),
// then v_k ~ N(0, sigma2). Samples k = 0..K, x_0 = 0.
GeneratedData generate_dataset(const SystemTriple& truth, Eigen::Index K, double input_variance, double sigma2,
                               Rng& rng, double h = 0.1);

// 10 log10(sum ||y_k - v_k||^2 / sum ||v_k||^2); +inf for zero noise.
double snr_db(const Matrix& clean, const Matrix& noise);

}  // namespace symid
