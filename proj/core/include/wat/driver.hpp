#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wat/data_io.hpp"
#include "wat/ensemble.hpp"
#include "wat/learners.hpp"
#include "wat/metrics.hpp"
#include "wat/reservoir.hpp"

namespace wat {

// Non-WRS ensembles that can ride along a run.
enum class BaselineScheme { None, TopK, MovingAverage, ExponentialAverage };

std::string_view to_string(BaselineScheme scheme) noexcept;
std::optional<BaselineScheme> parse_baseline(std::string_view name) noexcept;

struct RunConfig {
    Algorithm algorithm = Algorithm::PA2;
    Hyperparams hyper;

    bool wrs = false;
    std::size_t reservoir_size = 64;  // also the top-K size and moving-average window
    WeightingScheme weighting = WeightingScheme::Standard;
    AveragingScheme averaging = AveragingScheme::Simple;
    bool voting_zero = false;

    BaselineScheme baseline = BaselineScheme::None;
    double gamma = 0.9;  // exponential average

    std::uint64_t seed = 1;
    std::size_t checkpoints = 200;
    std::size_t dimension = 0;      // 0: largest index seen in train or test, + 1
    std::size_t test_subsample = 0; // 0: evaluate on the full test set
};

// Throws std::invalid_argument on inconsistent settings.
void validate(const RunConfig& config);

struct CheckpointRecord {
    std::uint64_t timestep = 0;
    double base_acc = 0.0;
    double ensemble_acc = 0.0;
    double base_sparsity = 0.0;
    double ensemble_sparsity = 0.0;

    friend bool operator==(const CheckpointRecord&, const CheckpointRecord&) = default;
};

struct RunSummary {
    double final_base_acc = 0.0;
    double final_ensemble_acc = 0.0;
    double final_base_sparsity = 0.0;
    double final_ensemble_sparsity = 0.0;
    std::uint64_t aggressive_steps = 0;  // mistakes, for pseudo-passive runs
    std::uint64_t offers = 0;
    std::size_t ensemble_members = 0;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunTrace {
    // "wrs", "topk", "movavg", "expavg", or empty for a plain base run whose
    // ensemble columns mirror the base model.
    std::string ensemble_tag;
    std::size_t dimension = 0;
    std::vector<CheckpointRecord> records;
    RunSummary summary;

    AccuracyCurve base_curve() const;
    AccuracyCurve ensemble_curve() const;

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

std::string trace_to_json(const RunTrace& trace);

// Seed of the reservoir's generator for a trial seed.
std::uint64_t reservoir_seed(std::uint64_t trial_seed) noexcept;

// stride = max(1, n_train / target); {0, stride, 2 stride, ...} plus n_train
// exactly once.
std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t n_train, std::uint64_t target);

// WRS-augmented training for passive-aggressive learners. On every example with
// positive hinge loss the current candidate is offered to the reservoir with its
// survival count, the learner updates, and the count resets; otherwise the count
// grows. The ensemble is rebuilt at checkpoints only; while the reservoir is
// empty it falls back to the current weights.
RunTrace run_wat(const RunConfig& config, std::span<const Example> train,
                 std::span<const Example> test);

// Variant for always-updating learners: the counter grows on sign-correct
// predictions, and on a mistake the pre-update weights are offered before the
// counter resets. The learner updates on every example.
RunTrace run_wat_pseudo_passive(const RunConfig& config, std::span<const Example> train,
                                std::span<const Example> test);

// Same loop without a reservoir; config.baseline picks an optional top-K,
// moving-average, or exponential-average ensemble.
RunTrace run_baseline(const RunConfig& config, std::span<const Example> train,
                      std::span<const Example> test);

// Dispatches on config.wrs and the learner family.
RunTrace run_trial(const RunConfig& config, std::span<const Example> train,
                   std::span<const Example> test);

}  // namespace wat
