#include "wat/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wat {
namespace {

std::size_t max_dimension(std::span<const Candidate> occupants) noexcept {
    std::size_t dim = 0;
    for (const Candidate& c : occupants) dim = std::max(dim, c.weights.dimension());
    return dim;
}

}  // namespace

std::string_view to_string(AveragingScheme scheme) noexcept {
    return scheme == AveragingScheme::Simple ? "simple" : "weighted";
}

std::optional<AveragingScheme> parse_averaging(std::string_view name) noexcept {
    if (name == "simple") return AveragingScheme::Simple;
    if (name == "weighted") return AveragingScheme::Weighted;
    return std::nullopt;
}

std::optional<WeightVector> simple_average(std::span<const Candidate> occupants) {
    if (occupants.empty()) return std::nullopt;
    WeightVector out(max_dimension(occupants));
    auto acc = out.coeffs();
    for (const Candidate& c : occupants) {
        const auto src = c.weights.coeffs();
        for (std::size_t i = 0; i < src.size(); ++i) acc[i] += src[i];
    }
    const auto n = static_cast<double>(occupants.size());
    for (double& v : acc) v /= n;
    return out;
}

std::optional<WeightVector> weighted_average(std::span<const Candidate> occupants,
                                             WeightingScheme scheme) {
    if (occupants.empty()) return std::nullopt;

    std::vector<double> b(occupants.size());
    if (scheme == WeightingScheme::Standard) {
        for (std::size_t j = 0; j < occupants.size(); ++j) {
            b[j] = static_cast<double>(occupants[j].survival);
        }
    } else {
        std::uint64_t s_max = 0;
        for (const Candidate& c : occupants) s_max = std::max(s_max, c.survival);
        for (std::size_t j = 0; j < occupants.size(); ++j) {
            b[j] = std::exp(-static_cast<double>(s_max - occupants[j].survival));
        }
    }

    const bool all_equal = std::all_of(b.begin(), b.end(), [&](double v) { return v == b.front(); });
    double total = 0.0;
    for (double v : b) total += v;
    if (all_equal || !(total > 0.0)) return simple_average(occupants);

    WeightVector out(max_dimension(occupants));
    auto acc = out.coeffs();
    for (std::size_t j = 0; j < occupants.size(); ++j) {
        if (b[j] == 0.0) continue;
        const auto src = occupants[j].weights.coeffs();
        for (std::size_t i = 0; i < src.size(); ++i) acc[i] += b[j] * src[i];
    }
    for (double& v : acc) v /= total;
    return out;
}

WeightVector voting_zero(WeightVector averaged, std::span<const Candidate> occupants) {
    if (occupants.empty()) return averaged;
    auto out = averaged.coeffs();
    const std::size_t n = occupants.size();
    std::vector<std::uint32_t> nonzero(out.size(), 0);
    for (const Candidate& c : occupants) {
        const auto src = c.weights.coeffs();
        const std::size_t len = std::min(src.size(), out.size());
        for (std::size_t i = 0; i < len; ++i) nonzero[i] += src[i] != 0.0 ? 1 : 0;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t zeros = n - nonzero[i];
        if (2 * zeros > n) out[i] = 0.0;
    }
    return averaged;
}

std::optional<WeightVector> build_ensemble(std::span<const Candidate> occupants,
                                           const EnsembleConfig& config, WeightingScheme scheme) {
    std::optional<WeightVector> avg = config.averaging == AveragingScheme::Simple
                                          ? simple_average(occupants)
                                          : weighted_average(occupants, scheme);
    if (avg && config.voting_zero) *avg = voting_zero(std::move(*avg), occupants);
    return avg;
}

TopKTracker::TopKTracker(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("top-K capacity must be at least 1");
    members_.reserve(capacity);
}

std::size_t TopKTracker::weakest() const noexcept {
    // smallest survival; among equals the latest birth is the weakest
    std::size_t worst = 0;
    for (std::size_t j = 1; j < members_.size(); ++j) {
        const Candidate& a = members_[j];
        const Candidate& b = members_[worst];
        if (a.survival < b.survival || (a.survival == b.survival && a.birth_timestep > b.birth_timestep)) {
            worst = j;
        }
    }
    return worst;
}

bool TopKTracker::offer(const WeightVector& w, std::uint64_t survival, std::uint64_t birth_timestep) {
    Candidate* slot = nullptr;
    if (members_.size() < capacity_) {
        slot = &members_.emplace_back();
    } else {
        const std::size_t j = weakest();
        const Candidate& cur = members_[j];
        const bool better = survival > cur.survival ||
                            (survival == cur.survival && birth_timestep < cur.birth_timestep);
        if (!better) return false;
        slot = &members_[j];
    }
    slot->weights.assign(w);
    slot->survival = survival;
    slot->weight = static_cast<double>(survival);
    slot->birth_timestep = birth_timestep;
    slot->log_key = 0.0;
    return true;
}

MovingAverage::MovingAverage(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("moving-average window must be at least 1");
    ring_.resize(capacity);
}

void MovingAverage::push(const WeightVector& w) {
    ring_[next_].assign(w);
    next_ = (next_ + 1) % capacity_;
    filled_ = std::min(filled_ + 1, capacity_);
}

std::optional<WeightVector> MovingAverage::mean() const {
    if (filled_ == 0) return std::nullopt;
    std::size_t dim = 0;
    for (std::size_t j = 0; j < filled_; ++j) dim = std::max(dim, ring_[j].dimension());
    WeightVector out(dim);
    auto acc = out.coeffs();
    // oldest to newest
    const std::size_t start = filled_ < capacity_ ? 0 : next_;
    for (std::size_t k = 0; k < filled_; ++k) {
        const auto src = ring_[(start + k) % capacity_].coeffs();
        for (std::size_t i = 0; i < src.size(); ++i) acc[i] += src[i];
    }
    const auto n = static_cast<double>(filled_);
    for (double& v : acc) v /= n;
    return out;
}

ExponentialAverage::ExponentialAverage(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

void ExponentialAverage::update(const WeightVector& w) {
    if (!value_) {
        value_ = w;
        return;
    }
    value_->ensure_dimension(w.dimension());
    auto bar = value_->coeffs();
    const auto src = w.coeffs();
    const double keep = 1.0 - gamma_;
    for (std::size_t i = 0; i < bar.size(); ++i) {
        const double wi = i < src.size() ? src[i] : 0.0;
        bar[i] = gamma_ * wi + keep * bar[i];
    }
}

}  // namespace wat
