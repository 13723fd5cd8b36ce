#include "symid/io.hpp"

#include "symid/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace symid {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

namespace {

double parse_double(const std::string& s, const fs::path& where) {
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw DataError("");
        }
        return v;
    } catch (const std::exception&) {
        throw DataError(where.string() + ": cannot parse number '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        out.push_back(cell);
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os = open_out(path);
    os << text;
    finish(os, path);
}

void write_dataset_csv(const fs::path& path, const IODataset& data) {
    data.validate();
    std::ostringstream os;
    os << "t";
    for (Eigen::Index i = 0; i < data.m(); ++i) {
        os << ",u_" << i + 1;
    }
    for (Eigen::Index i = 0; i < data.p(); ++i) {
        os << ",y_" << i + 1;
    }
    if (data.y_clean) {
        for (Eigen::Index i = 0; i < data.p(); ++i) {
            os << ",yclean_" << i + 1;
        }
    }
    os << "\n";
    for (Eigen::Index k = 0; k <= data.K(); ++k) {
        os << format_double(static_cast<double>(k) * data.h);
        for (Eigen::Index i = 0; i < data.m(); ++i) {
            os << "," << format_double(data.u(i, k));
        }
        for (Eigen::Index i = 0; i < data.p(); ++i) {
            os << "," << format_double(data.y(i, k));
        }
        if (data.y_clean) {
            for (Eigen::Index i = 0; i < data.p(); ++i) {
                os << "," << format_double((*data.y_clean)(i, k));
            }
        }
        os << "\n";
    }
    write_text(path, os.str());
}

IODataset read_dataset_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open dataset '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(is, line)) {
        throw DataError(path.string() + ": empty file");
    }
    const std::vector<std::string> head = split(line);
    if (head.empty() || head[0] != "t") {
        throw DataError(path.string() + ": first column must be 't'");
    }
    int m = 0, p = 0, pc = 0;
    for (std::size_t c = 1; c < head.size(); ++c) {
        if (head[c].rfind("u_", 0) == 0) {
            ++m;
        } else if (head[c].rfind("yclean_", 0) == 0) {
            ++pc;
        } else if (head[c].rfind("y_", 0) == 0) {
            ++p;
        } else {
            throw DataError(path.string() + ": unknown column '" + head[c] + "'");
        }
    }
    if (m == 0 || p == 0 || (pc != 0 && pc != p)) {
        throw DataError(path.string() + ": need u_ and y_ columns (and matching yclean_ columns if any)");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> cells = split(line);
        if (cells.size() != head.size()) {
            throw DataError(path.string() + ": row " + std::to_string(rows.size() + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " + std::to_string(head.size()));
        }
        std::vector<double> r;
        for (const auto& c : cells) {
            r.push_back(parse_double(c, path));
        }
        rows.push_back(std::move(r));
    }
    if (rows.size() < 2) {
        throw DataError(path.string() + ": need at least two samples");
    }
    const Eigen::Index N = static_cast<Eigen::Index>(rows.size());
    IODataset d;
    d.u.resize(m, N);
    d.y.resize(p, N);
    if (pc) {
        d.y_clean = Matrix(p, N);
    }
    for (Eigen::Index k = 0; k < N; ++k) {
        const auto& r = rows[static_cast<std::size_t>(k)];
        for (int i = 0; i < m; ++i) {
            d.u(i, k) = r[1 + i];
        }
        for (int i = 0; i < p; ++i) {
            d.y(i, k) = r[1 + m + i];
        }
        for (int i = 0; i < pc; ++i) {
            (*d.y_clean)(i, k) = r[1 + m + p + i];
        }
    }
    d.h = rows[1][0] - rows[0][0];
    d.validate();
    return d;
}

Json number_to_json(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

double number_from_json(const Json& j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        return parse_double(j.get<std::string>(), "json");
    }
    throw DataError("json: expected a number");
}

Json to_json(const DatasetMeta& meta) {
    return Json{{"n", meta.n},       {"m", meta.m},       {"p", meta.p},
                {"h", meta.h},       {"K", meta.K},       {"seed", meta.seed},
                {"sigma2", meta.sigma2}, {"snr", number_to_json(meta.snr)}};
}

DatasetMeta meta_from_json(const Json& j) {
    try {
        DatasetMeta m;
        m.n = j.at("n").get<int>();
        m.m = j.at("m").get<int>();
        m.p = j.at("p").get<int>();
        m.h = j.at("h").get<double>();
        m.K = j.at("K").get<long long>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.sigma2 = j.at("sigma2").get<double>();
        m.snr = number_from_json(j.at("snr"));
        return m;
    } catch (const Json::exception& e) {
        throw DataError(std::string("metadata: ") + e.what());
    }
}

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            r.push_back(number_to_json(M(i, j)));
        }
        rows.push_back(std::move(r));
    }
    return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const Json& j) {
    try {
        const Eigen::Index r = j.at("rows").get<Eigen::Index>();
        const Eigen::Index c = j.at("cols").get<Eigen::Index>();
        const Json& data = j.at("data");
        if (static_cast<Eigen::Index>(data.size()) != r) {
            throw DataError("matrix: row count mismatch");
        }
        Matrix M(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            if (static_cast<Eigen::Index>(data[i].size()) != c) {
                throw DataError("matrix: column count mismatch");
            }
            for (Eigen::Index k = 0; k < c; ++k) {
                M(i, k) = number_from_json(data[i][k]);
            }
        }
        return M;
    } catch (const Json::exception& e) {
        throw DataError(std::string("matrix: ") + e.what());
    }
}

Json to_json(const Realization& r, std::optional<PointKind> kind) {
    Json j{{"A", matrix_to_json(r.A)}, {"B", matrix_to_json(r.B)}, {"C", matrix_to_json(r.C)}};
    if (kind) {
        j["kind"] = *kind == PointKind::Spd ? "spd" : "diag_pos";
    } else {
        j["kind"] = "general";
    }
    return j;
}

Realization realization_from_json(const Json& j) {
    try {
        Realization r{matrix_from_json(j.at("A")), matrix_from_json(j.at("B")), matrix_from_json(j.at("C"))};
        r.check_dims();
        return r;
    } catch (const Json::exception& e) {
        throw DataError(std::string("system: ") + e.what());
    }
}

std::optional<PointKind> kind_from_json(const Json& j) {
    const std::string k = j.value("kind", "general");
    if (k == "spd") {
        return PointKind::Spd;
    }
    if (k == "diag_pos") {
        return PointKind::DiagPos;
    }
    return std::nullopt;
}

Json to_json(const ContinuousSystem& sys) {
    return Json{{"F", matrix_to_json(sys.F)}, {"G", matrix_to_json(sys.G)}, {"C", matrix_to_json(sys.C)}, {"h", sys.h}};
}

ContinuousSystem continuous_from_json(const Json& j) {
    try {
        ContinuousSystem s;
        s.F = matrix_from_json(j.at("F"));
        s.G = matrix_from_json(j.at("G"));
        s.C = matrix_from_json(j.at("C"));
        s.h = j.at("h").get<double>();
        s.validate();
        return s;
    } catch (const Json::exception& e) {
        throw DataError(std::string("continuous system: ") + e.what());
    }
}

Json to_json(const EvalReport& r) {
    Json j{{"f_value", number_to_json(r.f_value)},
           {"lambda_max_est", number_to_json(r.lambda_max_est)},
           {"stable", r.stable},
           {"snr", number_to_json(r.snr)}};
    j["g2"] = r.g2 ? number_to_json(*r.g2) : Json(nullptr);
    j["g_inf"] = r.g_inf ? number_to_json(*r.g_inf) : Json(nullptr);
    return j;
}

Json to_json(const StabilityReport& r) {
    return Json{{"stable", r.stable},
                {"lambda_max_a", number_to_json(r.lambda_max_a)},
                {"lambda_max_f", number_to_json(r.lambda_max_f)}};
}

void write_trace_csv(const fs::path& path, const OptTrace& trace) {
    std::ostringstream os;
    os << "iter,f,grad_norm,step,beta,backtracks,projection_condition,transport_fallback,descent_reset,"
          "line_search_exhausted,damped,symmetry_defect,min_real_eig,max_imag_eig\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : trace.records) {
        os << r.iter << "," << format_double(r.f) << "," << format_double(r.grad_norm) << ","
           << format_double(r.step) << "," << format_double(r.beta) << "," << r.backtracks << ","
           << opt(r.projection_condition) << "," << r.transport_fallback << "," << r.descent_reset << ","
           << r.line_search_exhausted << "," << r.damped << "," << opt(r.symmetry_defect) << ","
           << opt(r.min_real_eig) << "," << opt(r.max_imag_eig) << "\n";
    }
    write_text(path, os.str());
}

void write_bode_csv(const fs::path& path, const BodeTable& table) {
    std::ostringstream os;
    os << "omega";
    for (const auto& ch : table.channels) {
        os << ",mag_db_y" << ch.output + 1 << "_u" << ch.input + 1 << ",phase_deg_y" << ch.output + 1 << "_u"
           << ch.input + 1;
    }
    os << "\n";
    for (std::size_t k = 0; k < table.omega.size(); ++k) {
        os << format_double(table.omega[k]);
        for (const auto& ch : table.channels) {
            os << "," << format_double(ch.magnitude_db[k]) << "," << format_double(ch.phase_deg[k]);
        }
        os << "\n";
    }
    write_text(path, os.str());
}

Json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    try {
        return Json::parse(is);
    } catch (const Json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace symid
