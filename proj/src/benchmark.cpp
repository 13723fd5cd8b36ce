#include "symid/benchmark.hpp"

#include "symid/errors.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace symid {

std::vector<int> UndirectedGraph::degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n), 0);
    for (const auto& [a, b] : edges) {
        ++d[a];
        ++d[b];
    }
    return d;
}

bool UndirectedGraph::connected() const {
    if (n <= 1) {
        return true;
    }
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n;
}

void UndirectedGraph::validate() const {
    if (n < 1) {
        throw std::invalid_argument("graph: node count must be positive");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n) {
            throw std::invalid_argument("graph: edge endpoint out of range");
        }
        if (a >= b) {
            throw std::invalid_argument("graph: edges must be stored as (lo, hi) without self loops");
        }
        if (!seen.insert({a, b}).second) {
            throw std::invalid_argument("graph: duplicate edge");
        }
    }
}

UndirectedGraph watts_strogatz(int n, int mean_degree, double rewire_p, Rng& rng) {
    if (n < 1 || mean_degree < 0 || mean_degree % 2 != 0 || mean_degree >= n) {
        throw std::invalid_argument("watts_strogatz: need an even mean degree in [0, n)");
    }
    if (!(rewire_p >= 0.0 && rewire_p <= 1.0)) {
        throw std::invalid_argument("watts_strogatz: rewiring probability must lie in [0, 1]");
    }
    const int half = mean_degree / 2;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> node(0, n - 1);
    auto key = [](int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };

    for (int attempt = 0; attempt < 10000; ++attempt) {
        // Lattice edges in (offset, node) order; rewiring keeps the source node.
        std::vector<std::pair<int, int>> list;
        std::set<std::pair<int, int>> present;
        for (int j = 1; j <= half; ++j) {
            for (int i = 0; i < n; ++i) {
                const auto e = key(i, (i + j) % n);
                list.push_back({i, (i + j) % n});
                present.insert(e);
            }
        }
        std::vector<int> deg(static_cast<std::size_t>(n), mean_degree);
        for (auto& [src, dst] : list) {
            if (!(coin(rng) < rewire_p)) {
                continue;
            }
            if (deg[src] >= n - 1) {
                continue;
            }
            int w = node(rng);
            while (w == src || present.count(key(src, w))) {
                w = node(rng);
            }
            present.erase(key(src, dst));
            present.insert(key(src, w));
            --deg[dst];
            ++deg[w];
            dst = w;
        }
        UndirectedGraph g;
        g.n = n;
        for (const auto& [a, b] : list) {
            g.edges.push_back(key(a, b));
        }
        if (g.connected() || mean_degree == 0) {
            return g;
        }
    }
    throw SolverError("watts_strogatz: no connected graph after 10000 draws");
}

Matrix incidence(const UndirectedGraph& g) {
    g.validate();
    Matrix B = Matrix::Zero(g.n, g.edge_count());
    for (int j = 0; j < g.edge_count(); ++j) {
        B(g.edges[j].first, j) = 1.0;
        B(g.edges[j].second, j) = -1.0;
    }
    return B;
}

void RcNetworkSpec::validate(const UndirectedGraph& g) const {
    if (c_cap.size() != g.n || g_con.size() != g.n || r_res.size() != g.edge_count()) {
        throw DimensionError("rc spec: parameter vectors do not match the graph");
    }
    if (g_in.rows() != g.n || c_out.cols() != g.n) {
        throw DimensionError("rc spec: input/output maps do not match the graph");
    }
    if ((c_cap.array() <= 0.0).any() || (g_con.array() <= 0.0).any() || (r_res.array() <= 0.0).any()) {
        throw DomainError("rc spec: capacitances, conductances and resistances must be positive");
    }
}

RcNetworkSpec default_spec(const UndirectedGraph& g, int m, int p, Rng& rng) {
    if (m < 1 || p < 1 || m > g.n || p > g.n) {
        throw std::invalid_argument("default_spec: need 1 <= m, p <= n");
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto positive = [&] {
        double r = 0.0;
        while (r <= 0.0) {
            r = unif(rng);
        }
        return r;
    };
    RcNetworkSpec s;
    s.c_cap.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        s.c_cap(i) = 10.0 * positive();
    }
    s.g_con.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        s.g_con(i) = positive();
    }
    s.r_res = Vector::Constant(g.edge_count(), 0.1);
    s.g_in = Matrix::Zero(g.n, m);
    s.g_in.topRows(m).setIdentity();
    s.c_out = Matrix::Zero(p, g.n);
    s.c_out.leftCols(p).setIdentity();
    return s;
}

void ContinuousSystem::validate() const {
    if (F.rows() != F.cols() || G.rows() != F.rows() || C.cols() != F.rows()) {
        throw DimensionError("continuous system: inconsistent dimensions");
    }
    if (!all_finite(F) || !all_finite(G) || !all_finite(C)) {
        throw DomainError("continuous system: non-finite entries");
    }
    if ((F - F.transpose()).norm() > 1e-12 * std::max(1.0, F.norm())) {
        throw DomainError("continuous system: F must be symmetric");
    }
    if (!(h > 0.0)) {
        throw DomainError("continuous system: sampling interval must be positive");
    }
}

ContinuousSystem build_system(const UndirectedGraph& g, const RcNetworkSpec& spec, double h) {
    spec.validate(g);
    const Matrix Bi = incidence(g);
    const Matrix lap = Bi * spec.r_res.cwiseInverse().asDiagonal() * Bi.transpose();
    const Vector s = spec.c_cap.cwiseSqrt();
    const Vector si = s.cwiseInverse();
    Matrix inner = lap;
    inner.diagonal() += spec.g_con;
    ContinuousSystem out;
    out.F = sym(-(si.asDiagonal() * inner * si.asDiagonal()));
    out.G = si.asDiagonal() * spec.g_in;
    out.C = spec.c_out * s.asDiagonal();
    out.h = h;
    out.validate();
    return out;
}

double phi(double lambda, double h) {
    if (lambda == 0.0) {
        return h;
    }
    return std::expm1(lambda * h) / lambda;
}

SystemTriple discretize(const ContinuousSystem& sys) {
    sys.validate();
    const SymEig e = sym_eig(sys.F);
    const double h = sys.h;
    const Matrix A = sym_apply(e, [h](double l) { return std::exp(l * h); });
    const Matrix I = sym_apply(e, [h](double l) { return phi(l, h); });
    return SystemTriple::from_spectral(A, I * sys.G, sys.C);
}

BenchmarkSystem make_benchmark(const NetworkConfig& cfg, Rng& rng) {
    UndirectedGraph g = watts_strogatz(cfg.n, cfg.mean_degree, cfg.rewire_p, rng);
    RcNetworkSpec spec = default_spec(g, cfg.m, cfg.p, rng);
    ContinuousSystem cs = build_system(g, spec, cfg.h);
    SystemTriple d = discretize(cs);
    return BenchmarkSystem{std::move(g), std::move(spec), std::move(cs), std::move(d)};
}

double snr_db(const Matrix& clean, const Matrix& noise) {
    const double nn = noise.squaredNorm();
    if (nn == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(clean.squaredNorm() / nn);
}

GeneratedData generate_dataset(const SystemTriple& truth, Eigen::Index K, double input_variance, double sigma2,
                               Rng& rng, double h) {
    if (K < 1) {
        throw std::invalid_argument("generate_dataset: K must be positive");
    }
    if (!(input_variance > 0.0) || !(sigma2 >= 0.0)) {
        throw std::invalid_argument("generate_dataset: variances must be non-negative (input positive)");
    }
    const Eigen::Index m = truth.m(), p = truth.p();
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix u(m, K + 1);
    const double su = std::sqrt(input_variance);
    for (Eigen::Index k = 0; k <= K; ++k) {
        for (Eigen::Index i = 0; i < m; ++i) {
            u(i, k) = su * gauss(rng);
        }
    }
    const Simulation sim = simulate(truth, u);
    Matrix v = Matrix::Zero(p, K + 1);
    if (sigma2 > 0.0) {
        const double sv = std::sqrt(sigma2);
        for (Eigen::Index k = 0; k <= K; ++k) {
            for (Eigen::Index i = 0; i < p; ++i) {
                v(i, k) = sv * gauss(rng);
            }
        }
    }
    GeneratedData out;
    out.data.u = std::move(u);
    out.data.y = sim.y + v;
    out.data.y_clean = sim.y;
    out.data.h = h;
    out.snr = snr_db(sim.y, v);
    return out;
}

}  // namespace symid
