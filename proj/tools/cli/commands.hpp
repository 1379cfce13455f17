#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wat/metrics.hpp"

namespace wat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Bad flags, flag combinations, or a missing input file; maps to kExitUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// args excludes the program name. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Replaces `--config file.json` with the file's entries as flags, placed ahead
// of the remaining command-line flags so that later occurrences win. Booleans
// become bare flags (false drops them), arrays are comma-joined, and
// underscores in keys become hyphens. args[0] is the subcommand.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

// "1,2,5" or ranges "1-5" / "1..5", mixed freely. Throws UsageError.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);

// Runs fn(i) for i in [0, n) on up to `jobs` threads (0: hardware threads).
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct SweepCell {
    double c_err = 1.0;
    double eta = 1.0;
    double lambda = 0.0;
    double mean_final_acc = 0.0;
    double mean_rop = 0.0;
};

// Among the ceil(2.5%) (at least one) cells with the best mean final accuracy,
// the one with the highest mean ROP; earlier cells win ties. Throws on empty.
std::size_t select_sweep_cell(std::span<const SweepCell> cells);

struct ComparisonRow {
    std::string baseline_file;
    std::string candidate_file;
    std::string baseline_model;
    std::string candidate_model;
    std::size_t seeds = 0;
    double baseline_rop = 0.0;   // mean over seeds
    double candidate_rop = 0.0;
    double delta = 0.0;          // baseline_rop - candidate_rop; positive: candidate is steadier
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::size_t candidate_wins = 0;
    std::size_t baseline_wins = 0;
    std::size_t ties = 0;
    std::optional<WilcoxonResult> wilcoxon;  // empty when every delta is zero
};

// Pairs baseline_files[i] with candidate_files[i]. A model of "auto" picks the
// first tag other than base/oracle, falling back to base. Throws
// std::runtime_error on unreadable files, a missing model, or seeds/timesteps
// that differ between the paired files.
Comparison compare_files(const std::vector<std::string>& baseline_files,
                         const std::vector<std::string>& candidate_files,
                         const std::string& baseline_model = "auto",
                         const std::string& candidate_model = "auto");

}  // namespace wat::cli
