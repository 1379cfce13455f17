#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wat/driver.hpp"

namespace wat::cli {

// One line of the metrics CSV: seed,timestep,model,test_acc,sparsity
struct MetricsRow {
    std::uint64_t seed = 0;
    std::uint64_t timestep = 0;
    std::string model;  // base | wrs | topk | movavg | expavg | oracle
    double test_acc = 0.0;
    double sparsity = 0.0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr const char* kMetricsHeader = "seed,timestep,model,test_acc,sparsity";

// Floats are written with 6 decimals.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
// Throws std::runtime_error on a bad header or row.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<MetricsRow> read_metrics_csv_file(const std::string& path);

std::string metrics_to_json(std::span<const MetricsRow> rows);

// base rows, then the ensemble's rows (when the trace carries one), then the
// oracle (cumulative max of base accuracy, with the sparsity of the base model
// at the checkpoint where that maximum was first reached), per checkpoint.
std::vector<MetricsRow> trace_rows(std::uint64_t seed, const RunTrace& trace);

}  // namespace wat::cli
