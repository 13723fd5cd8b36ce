#pragma once

#include "symid/benchmark.hpp"
#include "symid/evaluation.hpp"
#include "symid/lti_model.hpp"
#include "symid/optimizers.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace symid {

using Json = nlohmann::json;
namespace fs = std::filesystem;

// Columns: t, u_1..u_m, y_1..y_p[, yclean_1..yclean_p]; one row per sample.
void write_dataset_csv(const fs::path& path, const IODataset& data);
// m and p come from the header; h from the time column.
IODataset read_dataset_csv(const fs::path& path);

struct DatasetMeta {
    int n = 0;
    int m = 0;
    int p = 0;
    double h = 0.1;
    long long K = 0;
    std::uint64_t seed = 0;
    double sigma2 = 0.0;
    double snr = 0.0;  // +inf serialized as "inf"
};

Json to_json(const DatasetMeta& meta);
DatasetMeta meta_from_json(const Json& j);

Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);

Json to_json(const Realization& r, std::optional<PointKind> kind);
Realization realization_from_json(const Json& j);
std::optional<PointKind> kind_from_json(const Json& j);

Json to_json(const ContinuousSystem& sys);
ContinuousSystem continuous_from_json(const Json& j);

Json to_json(const EvalReport& r);
Json to_json(const StabilityReport& r);

// Non-finite numbers as "inf", "-inf", "nan"; finite ones as numbers.
Json number_to_json(double v);
double number_from_json(const Json& j);

void write_trace_csv(const fs::path& path, const OptTrace& trace);
void write_bode_csv(const fs::path& path, const BodeTable& table);

Json read_json(const fs::path& path);
void write_json(const fs::path& path, const Json& j);
void write_text(const fs::path& path, const std::string& text);

// 17 significant digits, "inf"/"-inf"/"nan" otherwise.
std::string format_double(double v);

}  // namespace symid
