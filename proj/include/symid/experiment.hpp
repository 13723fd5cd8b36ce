#pragma once

#include "symid/benchmark.hpp"
#include "symid/evaluation.hpp"
#include "symid/io.hpp"
#include "symid/optimizers.hpp"
#include "symid/subspace_init.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symid {

struct ExperimentConfig {
    NetworkConfig net;
    long long K = 400;
    double sigma2 = 0.1;
    double input_variance = 100.0;
    std::vector<Variant> variants{Variant::Cg1, Variant::Cg2, Variant::Cg3, Variant::Hybrid};
    int trials = 1;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int max_iters = 20;
    int hybrid_switch = 15;
    int block_rows = 0;
    int jobs = 1;

    void validate() const;
};

Json to_json(const ExperimentConfig& cfg);
// Keys absent from j keep the values already in base.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});

// Seed of the stream used by the initial-point repair, derived from the data seed.
std::uint64_t init_seed(std::uint64_t data_seed);

struct GeneratedTrial {
    BenchmarkSystem system;
    GeneratedData data;
    DatasetMeta meta;
};

// Graph, parameters, inputs and noise from one stream seeded with seed.
GeneratedTrial generate_trial(const ExperimentConfig& cfg, std::uint64_t seed);

struct InitialPoints {
    Realization raw;
    SystemTriple spd;
    SystemTriple diag;
};

// MOESP followed by both repairs, which share identical random draws.
InitialPoints initial_points(const IODataset& data, int order, int block_rows, std::uint64_t seed);

OptConfig opt_config(const ExperimentConfig& cfg, Variant v);

// Runs one variant from the matching initial point (GN starts from the SPD one).
OptTrace identify(const InitialPoints& init, const IODataset& data, const OptConfig& oc);

struct VariantResult {
    Variant variant = Variant::Cg1;
    std::optional<OptTrace> trace;
    std::optional<EvalReport> report;
    std::string error;
};

struct TrialResult {
    int index = 0;
    std::uint64_t seed = 0;
    double snr = 0.0;
    double lambda_max_true = 0.0;
    std::optional<EvalReport> init_report;
    std::vector<VariantResult> variants;
    std::string error;
};

TrialResult run_trial(const ExperimentConfig& cfg, int index);

// Trials in index order; up to cfg.jobs run concurrently.
std::vector<TrialResult> run_batch(const ExperimentConfig& cfg);

struct VariantSummary {
    std::string name;
    int runs = 0;
    int unstable = 0;
    int failures = 0;
    double median_f = 0.0;
    double median_g2 = 0.0;
    double median_ginf = 0.0;
    double median_lambda_max = 0.0;
};

struct BatchSummary {
    int trials = 0;
    int failed_trials = 0;
    double snr_mean = 0.0;
    double snr_dev = 0.0;  // population standard deviation
    std::vector<VariantSummary> rows;  // "init" first, then variants
};

BatchSummary summarize(const ExperimentConfig& cfg, const std::vector<TrialResult>& results);
std::string summary_csv(const BatchSummary& s);
Json to_json(const TrialResult& r);

}  // namespace symid
