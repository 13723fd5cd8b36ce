#include "symid/experiment.hpp"

#include "symid/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace symid {

void ExperimentConfig::validate() const {
    if (net.n < 1 || net.m < 1 || net.p < 1 || K < 1 || trials < 1 || max_iters < 1 || jobs < 1) {
        throw std::invalid_argument("config: n, m, p, K, trials, max_iters and jobs must be positive");
    }
    if (net.m > net.n || net.p > net.n) {
        throw std::invalid_argument("config: m and p may not exceed n");
    }
    if (!(net.h > 0.0) || !(sigma2 >= 0.0) || !(input_variance > 0.0)) {
        throw std::invalid_argument("config: h and input_variance must be positive, sigma2 non-negative");
    }
    if (variants.empty()) {
        throw std::invalid_argument("config: no variants selected");
    }
    if (hybrid_switch < 0 || hybrid_switch >= max_iters) {
        throw std::invalid_argument("config: hybrid_switch must lie in [0, max_iters)");
    }
}

Json to_json(const ExperimentConfig& c) {
    Json v = Json::array();
    for (Variant x : c.variants) {
        v.push_back(to_string(x));
    }
    return Json{{"n", c.net.n},
                {"m", c.net.m},
                {"p", c.net.p},
                {"h", c.net.h},
                {"mean_degree", c.net.mean_degree},
                {"rewire_p", c.net.rewire_p},
                {"K", c.K},
                {"sigma2", c.sigma2},
                {"input_variance", c.input_variance},
                {"variants", v},
                {"trials", c.trials},
                {"seed", c.seed},
                {"out_dir", c.out_dir},
                {"max_iters", c.max_iters},
                {"hybrid_switch", c.hybrid_switch},
                {"block_rows", c.block_rows},
                {"jobs", c.jobs}};
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
    if (!j.is_object()) {
        throw DataError("config: expected a JSON object");
    }
    static const char* known[] = {"n",      "m",        "p",         "h",          "mean_degree", "rewire_p",
                                  "K",      "sigma2",   "input_variance", "variants", "trials",   "seed",
                                  "out_dir", "max_iters", "hybrid_switch", "block_rows", "jobs"};
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known)) {
            throw DataError("config: unknown key '" + key + "'");
        }
    }
    try {
        c.net.n = j.value("n", c.net.n);
        c.net.m = j.value("m", c.net.m);
        c.net.p = j.value("p", c.net.p);
        c.net.h = j.value("h", c.net.h);
        c.net.mean_degree = j.value("mean_degree", c.net.mean_degree);
        c.net.rewire_p = j.value("rewire_p", c.net.rewire_p);
        c.K = j.value("K", c.K);
        c.sigma2 = j.value("sigma2", c.sigma2);
        c.input_variance = j.value("input_variance", c.input_variance);
        if (j.contains("variants")) {
            c.variants.clear();
            for (const auto& v : j.at("variants")) {
                c.variants.push_back(parse_variant(v.get<std::string>()));
            }
        }
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.max_iters = j.value("max_iters", c.max_iters);
        c.hybrid_switch = j.value("hybrid_switch", c.hybrid_switch);
        c.block_rows = j.value("block_rows", c.block_rows);
        c.jobs = j.value("jobs", c.jobs);
    } catch (const Json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    return c;
}

std::uint64_t init_seed(std::uint64_t data_seed) { return data_seed ^ 0x9E3779B97F4A7C15ULL; }

GeneratedTrial generate_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    BenchmarkSystem sys = make_benchmark(cfg.net, rng);
    GeneratedData gd = generate_dataset(sys.discrete, cfg.K, cfg.input_variance, cfg.sigma2, rng, cfg.net.h);
    DatasetMeta meta;
    meta.n = cfg.net.n;
    meta.m = cfg.net.m;
    meta.p = cfg.net.p;
    meta.h = cfg.net.h;
    meta.K = cfg.K;
    meta.seed = seed;
    meta.sigma2 = cfg.sigma2;
    meta.snr = gd.snr;
    return GeneratedTrial{std::move(sys), std::move(gd), meta};
}

InitialPoints initial_points(const IODataset& data, int order, int block_rows, std::uint64_t seed) {
    SubspaceConfig sc;
    sc.order = order;
    sc.block_rows = block_rows;
    Realization raw = subspace_estimate(data, sc);
    Rng r1(init_seed(seed));
    Rng r2(init_seed(seed));
    SystemTriple spd = repair_spd(raw, r1);
    SystemTriple diag = repair_diag(raw, r2);
    return InitialPoints{std::move(raw), std::move(spd), std::move(diag)};
}

OptConfig opt_config(const ExperimentConfig& cfg, Variant v) {
    OptConfig oc;
    oc.variant = v;
    oc.max_iters = cfg.max_iters;
    oc.hybrid_switch = cfg.hybrid_switch;
    return oc;
}

OptTrace identify(const InitialPoints& init, const IODataset& data, const OptConfig& oc) {
    switch (oc.variant) {
        case Variant::Gn: return run_gn_baseline(init.spd.realization(), data, oc);
        case Variant::Cg3: return run(init.diag, data, oc);
        default: return run(init.spd, data, oc);
    }
}

TrialResult run_trial(const ExperimentConfig& cfg, int index) {
    TrialResult r;
    r.index = index;
    r.seed = cfg.seed + static_cast<std::uint64_t>(index);
    try {
        const GeneratedTrial g = generate_trial(cfg, r.seed);
        r.snr = g.data.snr;
        r.lambda_max_true = sym_eig(g.system.continuous.F).values.maxCoeff();
        const IODataset& data = g.data.data;
        const InitialPoints init = initial_points(data, cfg.net.n, cfg.block_rows, r.seed);
        r.init_report = evaluate(g.system.continuous, init.spd, data, r.snr);
        for (Variant v : cfg.variants) {
            VariantResult vr;
            vr.variant = v;
            try {
                vr.trace = identify(init, data, opt_config(cfg, v));
                if (v != Variant::Gn) {
                    vr.report = evaluate(g.system.continuous, vr.trace->final_point(), data, r.snr);
                }
            } catch (const std::exception& e) {
                vr.error = e.what();
            }
            r.variants.push_back(std::move(vr));
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

std::vector<TrialResult> run_batch(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<TrialResult> out(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < cfg.trials; i = next++) {
            out[static_cast<std::size_t>(i)] = run_trial(cfg, i);
        }
    };
    const int workers = std::min(cfg.jobs, cfg.trials);
    if (workers <= 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

struct Collector {
    VariantSummary row;
    std::vector<double> f, g2, ginf, lmax;

    void add(const EvalReport& e) {
        ++row.runs;
        f.push_back(e.f_value);
        lmax.push_back(e.lambda_max_est);
        if (!e.stable) {
            ++row.unstable;
            return;
        }
        if (e.g2) {
            g2.push_back(*e.g2);
        }
        if (e.g_inf) {
            ginf.push_back(*e.g_inf);
        }
    }

    VariantSummary done() {
        row.median_f = median(f);
        row.median_g2 = median(g2);
        row.median_ginf = median(ginf);
        row.median_lambda_max = median(lmax);
        return row;
    }
};

}  // namespace

BatchSummary summarize(const ExperimentConfig& cfg, const std::vector<TrialResult>& results) {
    BatchSummary s;
    s.trials = static_cast<int>(results.size());
    std::vector<double> snr;
    Collector init;
    init.row.name = "init";
    std::vector<Collector> cols(cfg.variants.size());
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
        cols[v].row.name = to_string(cfg.variants[v]);
    }
    for (const auto& r : results) {
        if (!r.error.empty()) {
            ++s.failed_trials;
            continue;
        }
        snr.push_back(r.snr);
        if (r.init_report) {
            init.add(*r.init_report);
        }
        for (std::size_t v = 0; v < r.variants.size() && v < cols.size(); ++v) {
            const auto& vr = r.variants[v];
            if (!vr.error.empty()) {
                ++cols[v].row.failures;
                continue;
            }
            if (vr.report) {
                cols[v].add(*vr.report);
            } else if (vr.trace) {
                ++cols[v].row.runs;
                cols[v].f.push_back(vr.trace->f_final());
            }
        }
    }
    if (!snr.empty()) {
        double sum = 0.0;
        for (double x : snr) {
            sum += x;
        }
        s.snr_mean = sum / static_cast<double>(snr.size());
        double sq = 0.0;
        for (double x : snr) {
            sq += (x - s.snr_mean) * (x - s.snr_mean);
        }
        s.snr_dev = std::sqrt(sq / static_cast<double>(snr.size()));
    }
    s.rows.push_back(init.done());
    for (auto& c : cols) {
        s.rows.push_back(c.done());
    }
    return s;
}

std::string summary_csv(const BatchSummary& s) {
    std::ostringstream os;
    os << "method,runs,unstable,failures,median_f,median_g2,median_ginf,median_lambda_max_f\n";
    for (const auto& r : s.rows) {
        os << r.name << "," << r.runs << "," << r.unstable << "," << r.failures << "," << format_double(r.median_f)
           << "," << format_double(r.median_g2) << "," << format_double(r.median_ginf) << ","
           << format_double(r.median_lambda_max) << "\n";
    }
    os << "# trials," << s.trials << ",failed," << s.failed_trials << ",snr_mean," << format_double(s.snr_mean)
       << ",snr_dev," << format_double(s.snr_dev) << "\n";
    return os.str();
}

Json to_json(const TrialResult& r) {
    Json j{{"index", r.index},
           {"seed", r.seed},
           {"snr", number_to_json(r.snr)},
           {"lambda_max_true", number_to_json(r.lambda_max_true)},
           {"error", r.error}};
    j["init"] = r.init_report ? to_json(*r.init_report) : Json(nullptr);
    Json vs = Json::array();
    for (const auto& v : r.variants) {
        Json x{{"variant", to_string(v.variant)}, {"error", v.error}};
        if (v.trace) {
            x["iterations"] = static_cast<int>(v.trace->records.size()) - 1;
            x["termination"] = to_string(v.trace->reason);
            x["f_final"] = number_to_json(v.trace->f_final());
        }
        x["report"] = v.report ? to_json(*v.report) : Json(nullptr);
        vs.push_back(std::move(x));
    }
    j["variants"] = vs;
    return j;
}

}  // namespace symid
