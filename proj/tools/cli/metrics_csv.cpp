#include "cli/metrics_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

namespace wat::cli {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* name) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::runtime_error("metrics CSV line " + std::to_string(line) + ": bad " + name + " '" +
                                 std::string(text) + "'");
    }
    return value;
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
    out << kMetricsHeader << '\n';
    char buf[128];
    for (const MetricsRow& r : rows) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", r.test_acc, r.sparsity);
        out << r.seed << ',' << r.timestep << ',' << r.model << buf;
    }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("metrics CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) throw std::runtime_error("metrics CSV has an unexpected header: " + line);

    std::vector<MetricsRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != 5) {
            throw std::runtime_error("metrics CSV line " + std::to_string(line_no) + ": expected 5 fields");
        }
        MetricsRow r;
        r.seed = parse_field<std::uint64_t>(fields[0], line_no, "seed");
        r.timestep = parse_field<std::uint64_t>(fields[1], line_no, "timestep");
        r.model = std::string(fields[2]);
        r.test_acc = parse_field<double>(fields[3], line_no, "test_acc");
        r.sparsity = parse_field<double>(fields[4], line_no, "sparsity");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file '" + path + "'");
    return read_metrics_csv(in);
}

std::string metrics_to_json(std::span<const MetricsRow> rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const MetricsRow& r : rows) {
        j.push_back({{"seed", r.seed},
                     {"timestep", r.timestep},
                     {"model", r.model},
                     {"test_acc", r.test_acc},
                     {"sparsity", r.sparsity}});
    }
    return j.dump();
}

std::vector<MetricsRow> trace_rows(std::uint64_t seed, const RunTrace& trace) {
    std::vector<MetricsRow> rows;
    const bool has_ensemble = !trace.ensemble_tag.empty();
    rows.reserve(trace.records.size() * (has_ensemble ? 3 : 2));
    double best_acc = 0.0;
    double best_sparsity = 0.0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const CheckpointRecord& rec = trace.records[i];
        if (i == 0 || rec.base_acc > best_acc) {
            best_acc = rec.base_acc;
            best_sparsity = rec.base_sparsity;
        }
        rows.push_back({seed, rec.timestep, "base", rec.base_acc, rec.base_sparsity});
        if (has_ensemble) {
            rows.push_back({seed, rec.timestep, trace.ensemble_tag, rec.ensemble_acc, rec.ensemble_sparsity});
        }
        rows.push_back({seed, rec.timestep, "oracle", best_acc, best_sparsity});
    }
    return rows;
}

}  // namespace wat::cli
