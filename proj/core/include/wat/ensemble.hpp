#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wat/reservoir.hpp"
#include "wat/sparse.hpp"

namespace wat {

enum class AveragingScheme { Simple, Weighted };

std::string_view to_string(AveragingScheme scheme) noexcept;
std::optional<AveragingScheme> parse_averaging(std::string_view name) noexcept;

// Coordinate-wise mean over the occupants (divides by occupant count, not
// capacity). nullopt when there are no occupants.
std::optional<WeightVector> simple_average(std::span<const Candidate> occupants);

// Survival-weighted mean. Standard weights use b = s; exponential weights use
// e^(s - max s), which normalises to the same convex combination as e^s without
// overflowing. Falls back to simple_average when every weight is equal or the
// weights sum to zero.
std::optional<WeightVector> weighted_average(std::span<const Candidate> occupants,
                                             WeightingScheme scheme);

// Zeroes coordinate i when strictly more than half of the occupants are exactly 0
// there. Occupants are read-only.
WeightVector voting_zero(WeightVector averaged, std::span<const Candidate> occupants);

struct EnsembleConfig {
    AveragingScheme averaging = AveragingScheme::Simple;
    bool voting_zero = false;
};

std::optional<WeightVector> build_ensemble(std::span<const Candidate> occupants,
                                           const EnsembleConfig& config, WeightingScheme scheme);

// Deterministic ablation: keeps the K longest-surviving candidates seen so far.
// On a survival tie at the boundary the earlier birth stays.
class TopKTracker {
public:
    explicit TopKTracker(std::size_t capacity);

    bool offer(const WeightVector& w, std::uint64_t survival, std::uint64_t birth_timestep);

    std::span<const Candidate> members() const noexcept { return members_; }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t weakest() const noexcept;

    std::size_t capacity_;
    std::vector<Candidate> members_;
};

// Mean of the most recent K pushed weight vectors.
class MovingAverage {
public:
    explicit MovingAverage(std::size_t capacity);

    void push(const WeightVector& w);
    // nullopt before the first push.
    std::optional<WeightVector> mean() const;
    std::size_t size() const noexcept { return filled_; }

private:
    std::size_t capacity_;
    std::vector<WeightVector> ring_;
    std::size_t next_ = 0;
    std::size_t filled_ = 0;
};

// bar = gamma w + (1 - gamma) bar; the first update sets bar = w.
class ExponentialAverage {
public:
    explicit ExponentialAverage(double gamma);

    void update(const WeightVector& w);
    const std::optional<WeightVector>& value() const noexcept { return value_; }
    double gamma() const noexcept { return gamma_; }

private:
    double gamma_;
    std::optional<WeightVector> value_;
};

}  // namespace wat
