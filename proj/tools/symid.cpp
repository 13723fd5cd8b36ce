// symid: generate benchmark data, identify symmetric systems, evaluate, batch, bode.
#include "symid/errors.hpp"
#include "symid/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace symid;

namespace {

enum Exit { Ok = 0, Usage = 1, Numerical = 2, Io = 3 };

struct ConfigFlags {
    std::string config_file;
    std::string variants;
    ExperimentConfig cfg;
};

void add_config_flags(CLI::App* sub, ConfigFlags& f, bool batch) {
    sub->add_option("--config", f.config_file, "JSON config file; flags override it");
    sub->add_option("--n", f.cfg.net.n, "state dimension");
    sub->add_option("--m", f.cfg.net.m, "inputs");
    sub->add_option("--p", f.cfg.net.p, "outputs");
    sub->add_option("--K", f.cfg.K, "samples after k = 0");
    sub->add_option("--interval", f.cfg.net.h, "sampling interval h");
    sub->add_option("--sigma2", f.cfg.sigma2, "output noise variance");
    sub->add_option("--input-variance", f.cfg.input_variance);
    sub->add_option("--mean-degree", f.cfg.net.mean_degree);
    sub->add_option("--rewire-p", f.cfg.net.rewire_p);
    sub->add_option("--seed", f.cfg.seed);
    sub->add_option("--out", f.cfg.out_dir, "output directory");
    if (batch) {
        sub->add_option("--trials", f.cfg.trials);
        sub->add_option("--variants", f.variants, "comma separated, e.g. CG1,CG2,CG3,HYBRID");
        sub->add_option("--max-iters", f.cfg.max_iters);
        sub->add_option("--hybrid-switch", f.cfg.hybrid_switch);
        sub->add_option("--block-rows", f.cfg.block_rows);
        sub->add_option("--jobs", f.cfg.jobs);
    }
}

// Config file values first, then every flag given on the command line.
ExperimentConfig resolve(CLI::App* sub, const ConfigFlags& f) {
    ExperimentConfig base;
    if (!f.config_file.empty()) {
        base = config_from_json(read_json(f.config_file), base);
    }
    const ExperimentConfig& c = f.cfg;
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--n")) base.net.n = c.net.n;
    if (given("--m")) base.net.m = c.net.m;
    if (given("--p")) base.net.p = c.net.p;
    if (given("--K")) base.K = c.K;
    if (given("--interval")) base.net.h = c.net.h;
    if (given("--sigma2")) base.sigma2 = c.sigma2;
    if (given("--input-variance")) base.input_variance = c.input_variance;
    if (given("--mean-degree")) base.net.mean_degree = c.net.mean_degree;
    if (given("--rewire-p")) base.net.rewire_p = c.net.rewire_p;
    if (given("--seed")) base.seed = c.seed;
    if (given("--out")) base.out_dir = c.out_dir;
    if (sub->get_option_no_throw("--trials")) {
        if (given("--trials")) base.trials = c.trials;
        if (given("--max-iters")) base.max_iters = c.max_iters;
        if (given("--hybrid-switch")) base.hybrid_switch = c.hybrid_switch;
        if (given("--block-rows")) base.block_rows = c.block_rows;
        if (given("--jobs")) base.jobs = c.jobs;
        if (given("--variants")) {
            base.variants.clear();
            std::stringstream ss(f.variants);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (!tok.empty()) {
                    base.variants.push_back(parse_variant(tok));
                }
            }
        }
    }
    base.validate();
    return base;
}

int cmd_generate(const ExperimentConfig& cfg) {
    const GeneratedTrial g = generate_trial(cfg, cfg.seed);
    const fs::path dir = cfg.out_dir;
    write_dataset_csv(dir / "dataset.csv", g.data.data);
    write_json(dir / "metadata.json", to_json(g.meta));
    Json edges = Json::array();
    for (const auto& [a, b] : g.system.graph.edges) {
        edges.push_back({a, b});
    }
    write_json(dir / "true_system.json",
               Json{{"continuous", to_json(g.system.continuous)},
                    {"discrete", to_json(g.system.discrete.realization(), PointKind::Spd)},
                    {"graph", {{"n", g.system.graph.n}, {"edges", edges}}},
                    {"c_cap", matrix_to_json(g.system.spec.c_cap)},
                    {"g_con", matrix_to_json(g.system.spec.g_con)},
                    {"r_res", matrix_to_json(g.system.spec.r_res)}});
    std::cout << "wrote " << (dir / "dataset.csv").string() << " (" << g.data.data.K() + 1 << " rows), snr "
              << format_double(g.meta.snr) << " dB\n";
    return Ok;
}

struct IdentifyArgs {
    std::string dir = ".";
    std::string variant = "CG1";
    int order = 0;
    int max_iters = 20;
    int hybrid_switch = 15;
    int block_rows = 0;
    std::string out;
};

int cmd_identify(const IdentifyArgs& a) {
    const fs::path dir = a.dir;
    const IODataset data = read_dataset_csv(dir / "dataset.csv");
    const DatasetMeta meta = meta_from_json(read_json(dir / "metadata.json"));
    IODataset d = data;
    d.h = meta.h;
    OptConfig oc;
    oc.variant = parse_variant(a.variant);
    oc.max_iters = a.max_iters;
    oc.hybrid_switch = a.hybrid_switch;
    oc.validate();
    const int order = a.order > 0 ? a.order : meta.n;
    const InitialPoints init = initial_points(d, order, a.block_rows, meta.seed);
    const OptTrace tr = identify(init, d, oc);

    const fs::path out = a.out.empty() ? dir : fs::path(a.out);
    const std::string tag = to_string(oc.variant);
    write_trace_csv(out / ("trace_" + tag + ".csv"), tr);
    Json est = to_json(tr.final, tr.final_kind);
    est["variant"] = tag;
    est["termination"] = to_string(tr.reason);
    est["iterations"] = static_cast<int>(tr.records.size()) - 1;
    est["f_initial"] = number_to_json(tr.f_initial());
    est["f_final"] = number_to_json(tr.f_final());
    const IterRecord& last = tr.records.back();
    if (last.symmetry_defect) {
        est["symmetry_defect"] = number_to_json(*last.symmetry_defect);
        est["min_real_eig"] = number_to_json(last.min_real_eig.value_or(0.0));
        est["max_imag_eig"] = number_to_json(last.max_imag_eig.value_or(0.0));
    }
    if (tr.final_kind) {
        const SystemTriple x = tr.final_point();
        est["stability"] = to_json(stability_report(x, d.h));
        try {
            write_json(out / ("continuous_" + tag + ".json"), to_json(recover_continuous(x, d.h)));
        } catch (const DomainError& e) {
            est["continuous_error"] = e.what();
        }
    }
    write_json(out / ("estimate_" + tag + ".json"), est);
    std::cout << tag << ": f " << format_double(tr.f_initial()) << " -> " << format_double(tr.f_final()) << " after "
              << tr.records.size() - 1 << " iterations (" << to_string(tr.reason) << ")\n";
    return Ok;
}

int cmd_evaluate(const std::string& dir_s, const std::string& estimate) {
    const fs::path dir = dir_s;
    const Json truth = read_json(dir / "true_system.json");
    const ContinuousSystem cs = continuous_from_json(truth.at("continuous"));
    const DatasetMeta meta = meta_from_json(read_json(dir / "metadata.json"));
    IODataset d = read_dataset_csv(dir / "dataset.csv");
    d.h = meta.h;
    const fs::path est_path = fs::path(estimate).is_absolute() || fs::exists(estimate) ? fs::path(estimate)
                                                                                        : dir / estimate;
    const Json est = read_json(est_path);
    const auto kind = kind_from_json(est);
    if (!kind) {
        throw DomainError("evaluate: estimate has no symmetric positive definite A; no continuous model exists");
    }
    const Realization r = realization_from_json(est);
    const SystemTriple x(r.A, r.B, r.C, *kind);
    const EvalReport rep = evaluate(cs, x, d, meta.snr);
    const std::string tag = est.value("variant", "estimate");
    write_json(dir / ("eval_" + tag + ".json"), to_json(rep));
    std::cout << to_json(rep).dump() << "\n";
    return Ok;
}

int cmd_batch(const ExperimentConfig& cfg) {
    const fs::path dir = cfg.out_dir;
    const std::vector<TrialResult> res = run_batch(cfg);
    std::ostringstream lines;
    for (const auto& r : res) {
        lines << to_json(r).dump() << "\n";
    }
    write_text(dir / "trials.jsonl", lines.str());
    const BatchSummary s = summarize(cfg, res);
    const std::string csv = summary_csv(s);
    write_text(dir / "summary.csv", csv);
    write_json(dir / "config.json", to_json(cfg));
    std::cout << csv;
    return Ok;
}

int cmd_bode(const std::string& system, double lo, double hi, int points, const std::string& out) {
    Json j = read_json(system);
    if (j.contains("continuous")) {
        j = j.at("continuous");
    }
    const ContinuousSystem cs = continuous_from_json(j);
    write_bode_csv(out, bode_data(cs, logspace(lo, hi, points)));
    std::cout << "wrote " << out << "\n";
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identification of symmetric LTI systems on Riemannian manifolds"};
    app.require_subcommand(1);

    ConfigFlags gen_flags;
    auto* gen = app.add_subcommand("generate", "simulate an RC-network benchmark and write the dataset");
    add_config_flags(gen, gen_flags, false);

    IdentifyArgs ida;
    auto* idc = app.add_subcommand("identify", "MOESP initial point followed by a Riemannian optimizer");
    idc->add_option("--dir", ida.dir, "directory holding dataset.csv and metadata.json");
    idc->add_option("--variant", ida.variant, "CG1, CG2, CG3, SD, HYBRID or GN");
    idc->add_option("--order", ida.order, "model order (default: n from the metadata)");
    idc->add_option("--max-iters", ida.max_iters);
    idc->add_option("--hybrid-switch", ida.hybrid_switch);
    idc->add_option("--block-rows", ida.block_rows);
    idc->add_option("--out", ida.out, "output directory (default: --dir)");

    std::string ev_dir = ".", ev_est = "estimate_CG1.json";
    auto* evc = app.add_subcommand("evaluate", "g2, g-inf and stability of an estimate against the true system");
    evc->add_option("--dir", ev_dir);
    evc->add_option("--estimate", ev_est);

    ConfigFlags batch_flags;
    auto* bat = app.add_subcommand("batch", "seeded trials with aggregated tables");
    add_config_flags(bat, batch_flags, true);

    std::string bode_sys, bode_out = "bode.csv";
    double wlo = -3.0, whi = 3.0;
    int wpts = 200;
    auto* bod = app.add_subcommand("bode", "magnitude/phase table of a continuous system");
    bod->add_option("--system", bode_sys, "true_system.json or continuous_<variant>.json")->required();
    bod->add_option("--wmin-exp", wlo, "log10 of the lowest frequency");
    bod->add_option("--wmax-exp", whi, "log10 of the highest frequency");
    bod->add_option("--points", wpts);
    bod->add_option("--out", bode_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : Usage;
    }

    try {
        if (*gen) {
            return cmd_generate(resolve(gen, gen_flags));
        }
        if (*idc) {
            return cmd_identify(ida);
        }
        if (*evc) {
            return cmd_evaluate(ev_dir, ev_est);
        }
        if (*bat) {
            return cmd_batch(resolve(bat, batch_flags));
        }
        if (*bod) {
            return cmd_bode(bode_sys, wlo, whi, wpts, bode_out);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Io;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Io;
    } catch (const DomainError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return Numerical;
    } catch (const SolverError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return Numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Numerical;
    }
    return Usage;
}
