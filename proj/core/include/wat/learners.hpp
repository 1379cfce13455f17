#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "wat/sparse.hpp"

namespace wat {

enum class Algorithm {
    PA1,                // passive-aggressive, linear slack
    PA2,                // passive-aggressive, squared slack ("pac")
    FSOL,               // first-order sparse online learning
    SGDMomentum,        // hinge subgradient with heavy-ball momentum
    AdaGrad,            // per-coordinate adaptive subgradient
    TruncatedGradient,  // subgradient with periodic shrinkage
};

std::string_view to_string(Algorithm algo) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

// True for learners that leave w untouched on zero-loss examples.
constexpr bool is_passive_aggressive(Algorithm algo) noexcept {
    return algo == Algorithm::PA1 || algo == Algorithm::PA2 || algo == Algorithm::FSOL;
}

struct Hyperparams {
    double c_err = 1.0;     // PA-I / PA-II aggressiveness
    double eta = 1.0;       // FSOL learning rate
    double lambda = 0.0;    // FSOL sparsity; threshold is eta * lambda
    double rate = 0.01;     // SGD+M, AdaGrad, truncated gradient
    double momentum = 0.9;  // SGD+M
    double gravity = 0.01;  // truncated gradient shrinkage per truncation, times rate
    std::uint64_t period = 10;
};

// Throws std::invalid_argument when a parameter used by algo is out of range.
void validate(Algorithm algo, const Hyperparams& hp);

inline constexpr double kAdagradEpsilon = 1e-8;

// w += l / (|x|^2 + 1/(2C)) * y x, with l the hinge loss at w. No-op if l == 0.
void pa2_update(WeightVector& w, const SparseVector& x, Label y, double c_err);

// w += min(C, l / |x|^2) * y x. No-op if l == 0 or x is empty.
void pa1_update(WeightVector& w, const SparseVector& x, Label y, double c_err);

struct FsolState {
    WeightVector theta;
    WeightVector w;  // w[i] == soft_threshold(theta[i], eta * lambda) for every i
};

double soft_threshold(double v, double threshold) noexcept;

// theta += eta y x; w re-thresholded on the touched coordinates. Untouched
// coordinates of theta do not move, so the invariant holds everywhere.
void fsol_update(FsolState& state, const SparseVector& x, Label y, double eta, double lambda);

struct MomentumState {
    WeightVector w;
    WeightVector velocity;
};

// v = momentum v + rate g, w += v, where g = y x on a margin error and 0 otherwise.
// Dense in the dimension of v.
void sgd_momentum_step(MomentumState& state, const SparseVector& x, Label y, double rate,
                       double momentum);

struct AdagradState {
    WeightVector w;
    WeightVector sum_sq;
};

void adagrad_step(AdagradState& state, const SparseVector& x, Label y, double rate);

struct TruncatedState {
    WeightVector w;
    std::uint64_t steps = 0;
};

// Subgradient step, then on every period-th call shrink all coordinates toward 0
// by rate * gravity, clipping at 0.
void truncated_gradient_step(TruncatedState& state, const SparseVector& x, Label y, double rate,
                             double gravity, std::uint64_t period);

// Owns one algorithm's state behind a uniform update/weights contract.
class Learner {
public:
    Learner(Algorithm algo, const Hyperparams& hp, std::size_t dimension = 0);

    Algorithm algorithm() const noexcept { return algo_; }
    const Hyperparams& hyperparams() const noexcept { return hp_; }

    // Applies this algorithm's rule to (x, y). For passive-aggressive learners the
    // caller is expected to call this only on aggressive steps; the rules are
    // no-ops at zero loss regardless.
    void update(const SparseVector& x, Label y);

    const WeightVector& weights() const noexcept;

private:
    using State = std::variant<WeightVector, FsolState, MomentumState, AdagradState, TruncatedState>;

    Algorithm algo_;
    Hyperparams hp_;
    State state_;
};

}  // namespace wat
