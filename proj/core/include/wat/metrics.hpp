#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wat/data_io.hpp"
#include "wat/sparse.hpp"

namespace wat {

// Fraction of examples with sign(<w, x>) == y. A zero margin is wrong for both
// classes. Throws std::invalid_argument on an empty set.
double accuracy(const WeightVector& w, std::span<const Example> examples);

// Fraction of exactly-zero coordinates among the first `dimension`; unallocated
// coordinates count as zero. Throws if w is allocated past `dimension`.
double sparsity(const WeightVector& w, std::size_t dimension);

struct CurvePoint {
    std::uint64_t timestep = 0;
    double accuracy = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

using AccuracyCurve = std::vector<CurvePoint>;

// Running maximum of the base curve.
AccuracyCurve oracle_curve(const AccuracyCurve& base);

// Mean of (oracle - model) over shared checkpoints. Throws std::invalid_argument
// when the timesteps differ or the curves are empty.
double rop(const AccuracyCurve& oracle, const AccuracyCurve& model);

struct WilcoxonResult {
    std::size_t n = 0;       // non-zero differences used
    double w_plus = 0.0;     // rank sum of positive differences a - b
    double w_minus = 0.0;
    double statistic = 0.0;  // min(w_plus, w_minus)
    double z = 0.0;          // only for the normal approximation
    double p_value = 1.0;    // two-sided
    bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 15;

// Two-sided Wilcoxon signed-rank test on differences a_i - b_i. Zero differences
// are dropped; tied magnitudes get average ranks. Up to kWilcoxonExactLimit
// differences the p-value comes from the exact sign-flip distribution of the
// (possibly tied) ranks; above that, a normal approximation with tie-corrected
// variance. Throws std::invalid_argument when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs);

}  // namespace wat
