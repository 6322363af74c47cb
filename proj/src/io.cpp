#include "pac/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pac {

namespace {

bool parse_double(std::string_view token, double& value) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    const auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; };
    while (i < line.size()) {
        while (i < line.size() && is_sep(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_sep(line[j])) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

void format_double(std::ostream& out, double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.write(buf, r.ptr - buf);
}

Dataset parse_rows(std::istream& in, const std::string& source, std::size_t line_no,
                   std::int64_t expected_rows) {
    std::vector<double> values;
    Index dim = 0;
    Index rows = 0;
    std::string line;
    bool first_content_row = true;
    while ((expected_rows < 0 || rows < expected_rows) && std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_row(line);
        if (tokens.empty()) continue;
        if (first_content_row) {
            first_content_row = false;
            double probe;
            if (expected_rows < 0 && !parse_double(tokens.front(), probe)) continue;  // header
        }
        if (dim == 0) {
            dim = static_cast<Index>(tokens.size());
        } else if (static_cast<Index>(tokens.size()) != dim) {
            throw IoError(source + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(dim) + " columns, got " + std::to_string(tokens.size()));
        }
        for (const auto& token : tokens) {
            double v;
            if (!parse_double(token, v))
                throw IoError(source + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                              std::string(token) + "'");
            if (!std::isfinite(v))
                throw IoError(source + ":" + std::to_string(line_no) + ": non-finite value");
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw IoError(source + ": no data rows");
    if (expected_rows >= 0 && rows != expected_rows)
        throw IoError(source + ": batch truncated, expected " + std::to_string(expected_rows) +
                      " rows, got " + std::to_string(rows));
    PointMatrix points(rows, dim);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < dim; ++c)
            points(r, c) = values[static_cast<std::size_t>(r * dim + c)];
    return Dataset(std::move(points));
}

}  // namespace

Dataset read_dataset(std::istream& in, const std::string& source_name) {
    return parse_rows(in, source_name, 0, -1);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    return read_dataset(in, path);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    for (Index r = 0; r < data.size(); ++r) {
        for (Index c = 0; c < data.dim(); ++c) {
            if (c) out.put(',');
            format_double(out, data.points(r, c));
        }
        out.put('\n');
    }
}

void write_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    write_dataset(out, data);
    if (!out) throw IoError("write failed: " + path);
}

void write_labeled(std::ostream& out, const Dataset& data, const std::vector<int>& labels) {
    if (labels.size() != static_cast<std::size_t>(data.size()))
        throw std::invalid_argument("write_labeled: label count mismatch");
    for (Index r = 0; r < data.size(); ++r) {
        for (Index c = 0; c < data.dim(); ++c) {
            if (c) out.put(',');
            format_double(out, data.points(r, c));
        }
        out.put(',');
        out << labels[static_cast<std::size_t>(r)];
        out.put('\n');
    }
}

void write_labeled(const std::string& path, const Dataset& data, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    write_labeled(out, data, labels);
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json result_metadata(const PacConfig& config, const PacResult& result) {
    nlohmann::json meta;
    meta["config"] = {{"threads", config.n_threads},
                      {"lambda_c", config.lambda_c},
                      {"epsilon", config.epsilon},
                      {"nu", config.nu},
                      {"tol", config.tol},
                      {"iter_max", config.iter_max},
                      {"seed", config.seed},
                      {"lambda_g_override", config.lambda_g_override},
                      {"max_workers", config.max_workers}};
    meta["lambda_g"] = result.lambda_g;
    meta["k"] = result.k;
    meta["omega_guard"] = result.omega_ok;
    meta["min_parallel_cluster_size"] = result.min_parallel_cluster_size;
    meta["energy"] = {{"parallel", result.parallel_energy},
                      {"grouping", result.grouping_energy},
                      {"pre_refinement", result.pre_refine_energy},
                      {"final", result.final_energy}};
    meta["phases"] = {
        {"parallel",
         {{"clusters", result.parallel_phase.clusters}, {"seconds", result.parallel_phase.seconds}}},
        {"grouping",
         {{"clusters", result.grouping_phase.clusters}, {"seconds", result.grouping_phase.seconds}}},
        {"refinement",
         {{"clusters", result.refinement_phase.clusters},
          {"seconds", result.refinement_phase.seconds}}}};
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t c = 0; c < result.final_partition.clusters.size(); ++c) {
        const ClusterSummary& s = result.final_partition.clusters[c];
        std::vector<double> centroid(s.centroid.data(), s.centroid.data() + s.centroid.cols());
        table.push_back({{"id", c},
                         {"size", s.size},
                         {"centroid", centroid},
                         {"variance", s.variance()}});
    }
    meta["clusters"] = std::move(table);
    nlohmann::json sweeps = nlohmann::json::array();
    const Index n = static_cast<Index>(result.final_partition.assignment.size());
    for (const RefineSweep& s : result.refine_trace)
        sweeps.push_back({{"energy", s.energy},
                          {"points_moved", s.points_moved},
                          {"fraction_moved",
                           static_cast<double>(s.points_moved) / static_cast<double>(n)},
                          {"k", s.k}});
    meta["refinement_trace"] = std::move(sweeps);
    return meta;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return j;
}

bool read_framed_batch(std::istream& in, Dataset& batch) {
    std::string line;
    std::size_t line_no = 0;
    for (;;) {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!split_row(line).empty()) break;
    }
    std::int64_t count = 0;
    const auto tokens = split_row(line);
    double as_double;
    if (tokens.size() != 1 || !parse_double(tokens.front(), as_double) ||
        as_double != std::floor(as_double) || as_double < 1)
        throw IoError("stdin:" + std::to_string(line_no) + ": expected a row-count prefix line");
    count = static_cast<std::int64_t>(as_double);
    batch = parse_rows(in, "stdin", line_no, count);
    return true;
}

}  // namespace pac
