#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wat/random.hpp"
#include "wat/sparse.hpp"

namespace wat {

enum class WeightingScheme { Standard, Exponential };

std::string_view to_string(WeightingScheme scheme) noexcept;
std::optional<WeightingScheme> parse_weighting(std::string_view name) noexcept;

// Guards the key exponent 1 / (b + eps) against b == 0.
inline constexpr double kKeyEpsilon = 1e-8;

// Standard: s. Exponential: e^s (inf once it overflows).
double wrs_weight(std::uint64_t survival, WeightingScheme scheme) noexcept;

// log of the sampling key u^(1 / (b + eps)), i.e. log(u) / (b + eps). Ordering
// matches the direct key; the log form cannot underflow to 0 or overflow.
// Throws std::invalid_argument unless 0 < u < 1 and b >= 0.
double wrs_log_key(double weight, double u);

// Consecutive passive steps of the current solution candidate.
class SurvivalCounter {
public:
    void tick() noexcept { ++count_; }
    void reset() noexcept { count_ = 0; }
    std::uint64_t value() const noexcept { return count_; }

private:
    std::uint64_t count_ = 0;
};

struct Candidate {
    WeightVector weights;
    double weight = 0.0;   // WRS weight b
    double log_key = 0.0;  // log of WRS key k
    std::uint64_t birth_timestep = 0;
    std::uint64_t survival = 0;
};

// Fixed-capacity A-Res reservoir of weight-vector snapshots. Slots fill in order
// until full; afterwards an offer replaces the minimum-key slot (lowest index on
// ties) only if its key is strictly larger.
class Reservoir {
public:
    Reservoir(std::size_t capacity, WeightingScheme scheme, std::uint64_t seed);

    // Draws exactly one uniform per call. The snapshot is copied only when it is
    // inserted.
    bool offer(const WeightVector& w, std::uint64_t survival, std::uint64_t birth_timestep);

    std::span<const Candidate> slots() const noexcept { return slots_; }
    std::size_t size() const noexcept { return slots_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return slots_.empty(); }
    bool full() const noexcept { return slots_.size() == capacity_; }
    WeightingScheme scheme() const noexcept { return scheme_; }
    std::uint64_t offers() const noexcept { return offers_; }

    // Debug dump: [{birth_timestep, survival, b, log_k, nnz}, ...].
    std::string to_json() const;

private:
    std::size_t argmin_slot() const noexcept;

    std::size_t capacity_;
    WeightingScheme scheme_;
    Rng rng_;
    std::vector<Candidate> slots_;
    std::uint64_t offers_ = 0;
};

}  // namespace wat
