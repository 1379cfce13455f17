#include "wat/reservoir.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wat {

std::string_view to_string(WeightingScheme scheme) noexcept {
    return scheme == WeightingScheme::Standard ? "standard" : "exponential";
}

std::optional<WeightingScheme> parse_weighting(std::string_view name) noexcept {
    if (name == "standard") return WeightingScheme::Standard;
    if (name == "exponential" || name == "exp") return WeightingScheme::Exponential;
    return std::nullopt;
}

double wrs_weight(std::uint64_t survival, WeightingScheme scheme) noexcept {
    const auto s = static_cast<double>(survival);
    return scheme == WeightingScheme::Standard ? s : std::exp(s);
}

double wrs_log_key(double weight, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("WRS uniform must lie in (0, 1)");
    if (!(weight >= 0.0)) throw std::invalid_argument("WRS weight must be non-negative");
    return std::log(u) / (weight + kKeyEpsilon);
}

Reservoir::Reservoir(std::size_t capacity, WeightingScheme scheme, std::uint64_t seed)
    : capacity_(capacity), scheme_(scheme), rng_(seed) {
    if (capacity == 0) throw std::invalid_argument("reservoir capacity must be at least 1");
    slots_.reserve(capacity);
}

std::size_t Reservoir::argmin_slot() const noexcept {
    std::size_t best = 0;
    for (std::size_t j = 1; j < slots_.size(); ++j) {
        if (slots_[j].log_key < slots_[best].log_key) best = j;
    }
    return best;
}

bool Reservoir::offer(const WeightVector& w, std::uint64_t survival, std::uint64_t birth_timestep) {
    ++offers_;
    const double b = wrs_weight(survival, scheme_);
    const double log_key = wrs_log_key(b, open_unit(rng_));

    Candidate* slot = nullptr;
    if (!full()) {
        slot = &slots_.emplace_back();
    } else {
        const std::size_t i = argmin_slot();
        if (!(log_key > slots_[i].log_key)) return false;
        slot = &slots_[i];
    }
    slot->weights.assign(w);
    slot->weight = b;
    slot->log_key = log_key;
    slot->birth_timestep = birth_timestep;
    slot->survival = survival;
    return true;
}

std::string Reservoir::to_json() const {
    nlohmann::json slots = nlohmann::json::array();
    for (const Candidate& c : slots_) {
        slots.push_back({{"birth_timestep", c.birth_timestep},
                         {"survival", c.survival},
                         {"b", c.weight},
                         {"log_k", c.log_key},
                         {"nnz", c.weights.count_nonzero()}});
    }
    return slots.dump();
}

}  // namespace wat
