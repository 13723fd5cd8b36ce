#include "symid/errors.hpp"
#include "symid/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace symid;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.net.n = 6;
    c.net.m = 1;
    c.net.p = 1;
    c.net.mean_degree = 4;
    c.K = 120;
    c.sigma2 = 0.01;
    c.max_iters = 6;
    c.hybrid_switch = 3;
    c.seed = 11;
    return c;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("symid_exp_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

int cli(const std::string& args) {
    const std::string cmd = std::string(SYMID_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig c = small_config();
    CHECK_NOTHROW(c.validate());
    c.net.m = 7;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.sigma2 = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.variants.clear();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.hybrid_switch = c.max_iters;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("config JSON round trip and unknown keys") {
    ExperimentConfig c = small_config();
    c.variants = {Variant::Cg2, Variant::Gn};
    c.jobs = 3;
    const ExperimentConfig b = config_from_json(to_json(c));
    CHECK(to_json(b) == to_json(c));
    CHECK(config_from_json(Json{{"K", 77}}, c).K == 77);
    CHECK(config_from_json(Json{{"K", 77}}, c).net.n == 6);
    CHECK_THROWS_AS(config_from_json(Json{{"bogus", 1}}), DataError);
    CHECK_THROWS(config_from_json(Json{{"variants", {"CG9"}}}));
}

TEST_CASE("trial generation is deterministic in the seed") {
    const ExperimentConfig c = small_config();
    const GeneratedTrial a = generate_trial(c, 5), b = generate_trial(c, 5), d = generate_trial(c, 6);
    CHECK(a.data.data.u == b.data.data.u);
    CHECK(a.data.data.y == b.data.data.y);
    CHECK(a.system.graph.edges == b.system.graph.edges);
    CHECK(a.data.data.u.cols() == c.K + 1);
    CHECK(a.meta.seed == 5);
    CHECK(a.data.data.y != d.data.data.y);
    CHECK(init_seed(5) != 5);
}

TEST_CASE("both repairs start from the same spectrum") {
    const ExperimentConfig c = small_config();
    const GeneratedTrial g = generate_trial(c, 3);
    const InitialPoints p = initial_points(g.data.data, c.net.n, 0, 3);
    Vector d = p.diag.A().diagonal();
    std::sort(d.data(), d.data() + d.size());
    CHECK((sym_eig(p.spd.A()).values - d).norm() <= 1e-12 * d.norm());
    CHECK(objective(p.spd.realization(), g.data.data).f ==
          doctest::Approx(objective(p.diag.realization(), g.data.data).f).epsilon(1e-9));
}

TEST_CASE("batch results do not depend on the number of workers") {
    ExperimentConfig c = small_config();
    c.trials = 3;
    c.variants = {Variant::Cg1, Variant::Cg3};
    const auto serial = run_batch(c);
    c.jobs = 3;
    const auto parallel = run_batch(c);
    REQUIRE(serial.size() == 3);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].seed == c.seed + i);
        CHECK(to_json(serial[i]) == to_json(parallel[i]));
    }
    const BatchSummary s = summarize(c, serial);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[0].name == "init");
    CHECK(s.rows[1].name == "CG1");
    CHECK(s.rows[1].runs + s.rows[1].failures == 3);
    const std::string csv = summary_csv(s);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 4);
}

TEST_CASE("optimizers never increase the cost from the shared initial point") {
    ExperimentConfig c = small_config();
    c.variants = {Variant::Cg1, Variant::Cg2, Variant::Cg3, Variant::Hybrid, Variant::Sd};
    const TrialResult r = run_trial(c, 0);
    REQUIRE(r.error.empty());
    for (const auto& v : r.variants) {
        REQUIRE(v.trace);
        CHECK(v.trace->f_final() <= v.trace->f_initial());
        CHECK(v.trace->all_iterates_valid);
    }
}

TEST_CASE("command line generate is reproducible and identify matches the library") {
    const fs::path a = scratch_dir("gen_a"), b = scratch_dir("gen_b");
    const std::string common = "--n 6 --m 1 --p 1 --mean-degree 4 --K 120 --sigma2 0.01 --seed 11";
    REQUIRE(cli("generate " + common + " --out " + a.string()) == 0);
    REQUIRE(cli("generate " + common + " --out " + b.string()) == 0);
    for (const char* f : {"dataset.csv", "metadata.json", "true_system.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
    const std::string csv = slurp(a / "dataset.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 121);

    REQUIRE(cli("identify --dir " + a.string() + " --variant CG1 --max-iters 6") == 0);
    const Json est = read_json(a / "estimate_CG1.json");
    ExperimentConfig c = small_config();
    c.variants = {Variant::Cg1};
    const TrialResult r = run_trial(c, 0);
    REQUIRE(r.variants.at(0).trace);
    CHECK(number_from_json(est.at("f_final")) == r.variants[0].trace->f_final());
    CHECK(fs::exists(a / "trace_CG1.csv"));

    REQUIRE(cli("evaluate --dir " + a.string() + " --estimate estimate_CG1.json") == 0);
    const Json ev = read_json(a / "eval_CG1.json");
    CHECK(ev.at("f_value") == doctest::Approx(r.variants[0].report->f_value).epsilon(1e-12));

    REQUIRE(cli("bode --system " + (a / "true_system.json").string() + " --points 7 --out " +
                (a / "bode.csv").string()) == 0);
    const std::string bode = slurp(a / "bode.csv");
    CHECK(std::count(bode.begin(), bode.end(), '\n') == 8);
}

TEST_CASE("command line exit codes") {
    const fs::path d = scratch_dir("codes");
    CHECK(cli("--no-such-flag") == 1);
    CHECK(cli("generate --n 3 --m 5 --out " + d.string()) == 1);
    CHECK(cli("identify --dir " + (d / "missing").string()) == 3);
    REQUIRE(cli("generate --n 6 --m 1 --p 1 --mean-degree 4 --K 60 --out " + d.string()) == 0);
    CHECK(cli("identify --dir " + d.string() + " --variant CG9") == 1);
    REQUIRE(cli("identify --dir " + d.string() + " --variant GN --max-iters 2") == 0);
    // GN estimates are not symmetric, so there is no continuous model to evaluate.
    CHECK(cli("evaluate --dir " + d.string() + " --estimate estimate_GN.json") == 2);
}

TEST_CASE("batch command writes its tables") {
    const fs::path d = scratch_dir("batch");
    REQUIRE(cli("batch --n 6 --m 1 --p 1 --mean-degree 4 --K 80 --trials 2 --variants CG1,CG3 --max-iters 3 "
                "--hybrid-switch 1 --jobs 2 --out " +
                d.string()) == 0);
    const std::string lines = slurp(d / "trials.jsonl");
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
    CHECK(fs::exists(d / "summary.csv"));
    CHECK(read_json(d / "config.json").at("trials") == 2);
}
