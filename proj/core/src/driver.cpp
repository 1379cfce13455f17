#include "wat/driver.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace wat {
namespace {

constexpr std::uint64_t kReservoirStream = 0x7e5e;

enum class Trigger { HingeLoss, Misclassification };

// Whichever ensemble a run carries. At most one member is engaged.
struct Ensembler {
    std::optional<Reservoir> reservoir;
    std::optional<TopKTracker> top_k;
    std::optional<MovingAverage> moving;
    std::optional<ExponentialAverage> exponential;
    EnsembleConfig config;
    WeightingScheme weighting = WeightingScheme::Standard;

    bool collects_candidates() const noexcept { return reservoir || top_k; }

    void offer(const WeightVector& w, std::uint64_t survival, std::uint64_t birth) {
        if (reservoir) reservoir->offer(w, survival, birth);
        if (top_k) top_k->offer(w, survival, birth);
    }

    void observe(const WeightVector& w) {
        if (moving) moving->push(w);
        if (exponential) exponential->update(w);
    }

    std::optional<WeightVector> build() const {
        if (reservoir) return build_ensemble(reservoir->slots(), config, weighting);
        if (top_k) return build_ensemble(top_k->members(), config, WeightingScheme::Standard);
        if (moving) return moving->mean();
        if (exponential) return exponential->value();
        return std::nullopt;
    }

    std::size_t members() const noexcept {
        if (reservoir) return reservoir->size();
        if (top_k) return top_k->members().size();
        if (moving) return moving->size();
        if (exponential) return exponential->value() ? 1 : 0;
        return 0;
    }
};

std::size_t resolve_dimension(const RunConfig& config, std::span<const Example> train,
                              std::span<const Example> test) {
    const std::size_t observed = std::max(observed_dimension(train), observed_dimension(test));
    if (config.dimension == 0) return observed;
    if (config.dimension < observed) {
        throw std::invalid_argument("declared dimension " + std::to_string(config.dimension) +
                                    " is smaller than the data extent " + std::to_string(observed));
    }
    return config.dimension;
}

RunTrace run_loop(const RunConfig& config, std::span<const Example> train,
                  std::span<const Example> test, Trigger trigger, Ensembler ens, std::string tag) {
    validate(config);
    if (train.empty()) throw std::invalid_argument("training stream is empty");
    if (test.empty()) throw std::invalid_argument("test set is empty");
    if (config.test_subsample != 0 && config.test_subsample < test.size()) {
        test = test.first(config.test_subsample);
    }

    RunTrace trace;
    trace.ensemble_tag = std::move(tag);
    trace.dimension = resolve_dimension(config, train, test);
    const std::size_t dim = trace.dimension;

    Learner learner(config.algorithm, config.hyper, dim);
    const auto schedule = checkpoint_schedule(train.size(), config.checkpoints);
    trace.records.reserve(schedule.size());

    const auto record = [&](std::uint64_t t) {
        const WeightVector& w = learner.weights();
        CheckpointRecord rec;
        rec.timestep = t;
        rec.base_acc = accuracy(w, test);
        rec.base_sparsity = sparsity(w, dim);
        if (auto ensemble = ens.build()) {
            rec.ensemble_acc = accuracy(*ensemble, test);
            rec.ensemble_sparsity = sparsity(*ensemble, dim);
        } else {
            rec.ensemble_acc = rec.base_acc;
            rec.ensemble_sparsity = rec.base_sparsity;
        }
        trace.records.push_back(rec);
    };

    SurvivalCounter survival;
    std::uint64_t birth = 0;
    RunSummary& summary = trace.summary;

    ens.observe(learner.weights());
    std::size_t next_checkpoint = 0;
    if (schedule.front() == 0) {
        record(0);
        ++next_checkpoint;
    }

    for (std::uint64_t t = 1; t <= train.size(); ++t) {
        const Example& ex = train[t - 1];
        const WeightVector& w = learner.weights();
        if (trigger == Trigger::HingeLoss) {
            if (hinge_loss(w, ex.x, ex.y) > 0.0) {
                ++summary.aggressive_steps;
                if (ens.collects_candidates()) {
                    ens.offer(w, survival.value(), birth);
                    ++summary.offers;
                }
                learner.update(ex.x, ex.y);
                survival.reset();
                birth = t;
            } else {
                survival.tick();
            }
        } else {
            if (sign(ex.y) * dot(w, ex.x) > 0.0) {
                survival.tick();
            } else {
                ++summary.aggressive_steps;
                if (ens.collects_candidates()) {
                    ens.offer(w, survival.value(), t - 1);
                    ++summary.offers;
                }
                survival.reset();
            }
            learner.update(ex.x, ex.y);
        }
        ens.observe(learner.weights());

        if (next_checkpoint < schedule.size() && schedule[next_checkpoint] == t) {
            record(t);
            ++next_checkpoint;
        }
    }

    const CheckpointRecord& last = trace.records.back();
    summary.final_base_acc = last.base_acc;
    summary.final_ensemble_acc = last.ensemble_acc;
    summary.final_base_sparsity = last.base_sparsity;
    summary.final_ensemble_sparsity = last.ensemble_sparsity;
    summary.ensemble_members = ens.members();
    return trace;
}

Ensembler make_reservoir_ensembler(const RunConfig& config) {
    Ensembler ens;
    ens.reservoir.emplace(config.reservoir_size, config.weighting, reservoir_seed(config.seed));
    ens.config = {config.averaging, config.voting_zero};
    ens.weighting = config.weighting;
    return ens;
}

}  // namespace

std::string_view to_string(BaselineScheme scheme) noexcept {
    switch (scheme) {
        case BaselineScheme::None: return "none";
        case BaselineScheme::TopK: return "topk";
        case BaselineScheme::MovingAverage: return "movavg";
        case BaselineScheme::ExponentialAverage: return "expavg";
    }
    return "none";
}

std::optional<BaselineScheme> parse_baseline(std::string_view name) noexcept {
    if (name == "none") return BaselineScheme::None;
    if (name == "topk") return BaselineScheme::TopK;
    if (name == "movavg") return BaselineScheme::MovingAverage;
    if (name == "expavg") return BaselineScheme::ExponentialAverage;
    return std::nullopt;
}

void validate(const RunConfig& config) {
    validate(config.algorithm, config.hyper);
    if (config.reservoir_size == 0) throw std::invalid_argument("reservoir size K must be at least 1");
    if (config.checkpoints < 2) throw std::invalid_argument("checkpoint target must be at least 2");
    if (config.wrs && config.baseline != BaselineScheme::None) {
        throw std::invalid_argument("a run carries either the WRS ensemble or one baseline scheme");
    }
    if (config.voting_zero && !config.wrs && config.baseline != BaselineScheme::TopK) {
        throw std::invalid_argument("voting-based zeroing needs --wrs or the top-K baseline");
    }
    if (config.baseline == BaselineScheme::ExponentialAverage &&
        !(config.gamma > 0.0 && config.gamma <= 1.0)) {
        throw std::invalid_argument("gamma must lie in (0, 1]");
    }
}

AccuracyCurve RunTrace::base_curve() const {
    AccuracyCurve c;
    c.reserve(records.size());
    for (const auto& r : records) c.push_back({r.timestep, r.base_acc});
    return c;
}

AccuracyCurve RunTrace::ensemble_curve() const {
    AccuracyCurve c;
    c.reserve(records.size());
    for (const auto& r : records) c.push_back({r.timestep, r.ensemble_acc});
    return c;
}

std::string trace_to_json(const RunTrace& trace) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : trace.records) {
        records.push_back({{"timestep", r.timestep},
                           {"base_test_acc", r.base_acc},
                           {"ensemble_test_acc", r.ensemble_acc},
                           {"base_sparsity", r.base_sparsity},
                           {"ensemble_sparsity", r.ensemble_sparsity}});
    }
    const RunSummary& s = trace.summary;
    nlohmann::json j = {
        {"ensemble", trace.ensemble_tag},
        {"dimension", trace.dimension},
        {"records", std::move(records)},
        {"summary",
         {{"final_base_acc", s.final_base_acc},
          {"final_ensemble_acc", s.final_ensemble_acc},
          {"final_base_sparsity", s.final_base_sparsity},
          {"final_ensemble_sparsity", s.final_ensemble_sparsity},
          {"aggressive_steps", s.aggressive_steps},
          {"offers", s.offers},
          {"ensemble_members", s.ensemble_members}}},
    };
    return j.dump();
}

std::uint64_t reservoir_seed(std::uint64_t trial_seed) noexcept {
    return derive_seed(trial_seed, kReservoirStream);
}

std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t n_train, std::uint64_t target) {
    if (n_train == 0 || target == 0) {
        throw std::invalid_argument("checkpoint schedule needs n_train >= 1 and target >= 1");
    }
    const std::uint64_t stride = std::max<std::uint64_t>(1, n_train / target);
    std::vector<std::uint64_t> out;
    out.reserve(n_train / stride + 2);
    for (std::uint64_t t = 0; t <= n_train; t += stride) out.push_back(t);
    if (out.back() != n_train) out.push_back(n_train);
    return out;
}

RunTrace run_wat(const RunConfig& config, std::span<const Example> train,
                 std::span<const Example> test) {
    if (!is_passive_aggressive(config.algorithm)) {
        throw std::invalid_argument("run_wat needs a passive-aggressive learner; use the pseudo-passive variant");
    }
    return run_loop(config, train, test, Trigger::HingeLoss, make_reservoir_ensembler(config), "wrs");
}

RunTrace run_wat_pseudo_passive(const RunConfig& config, std::span<const Example> train,
                                std::span<const Example> test) {
    if (is_passive_aggressive(config.algorithm)) {
        throw std::invalid_argument("pseudo-passive WAT is for always-updating learners");
    }
    return run_loop(config, train, test, Trigger::Misclassification, make_reservoir_ensembler(config),
                    "wrs");
}

RunTrace run_baseline(const RunConfig& config, std::span<const Example> train,
                      std::span<const Example> test) {
    RunConfig base = config;
    base.wrs = false;
    const Trigger trigger =
        is_passive_aggressive(config.algorithm) ? Trigger::HingeLoss : Trigger::Misclassification;
    Ensembler ens;
    std::string tag;
    switch (config.baseline) {
        case BaselineScheme::None:
            break;
        case BaselineScheme::TopK:
            ens.top_k.emplace(config.reservoir_size);
            ens.config = {config.averaging, config.voting_zero};
            tag = "topk";
            break;
        case BaselineScheme::MovingAverage:
            ens.moving.emplace(config.reservoir_size);
            tag = "movavg";
            break;
        case BaselineScheme::ExponentialAverage:
            ens.exponential.emplace(config.gamma);
            tag = "expavg";
            break;
    }
    return run_loop(base, train, test, trigger, std::move(ens), std::move(tag));
}

RunTrace run_trial(const RunConfig& config, std::span<const Example> train,
                   std::span<const Example> test) {
    if (!config.wrs) return run_baseline(config, train, test);
    return is_passive_aggressive(config.algorithm) ? run_wat(config, train, test)
                                                   : run_wat_pseudo_passive(config, train, test);
}

}  // namespace wat
