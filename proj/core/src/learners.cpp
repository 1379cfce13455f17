#include "wat/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wat {

std::string_view to_string(Algorithm algo) noexcept {
    switch (algo) {
        case Algorithm::PA1: return "pa1";
        case Algorithm::PA2: return "pac";
        case Algorithm::FSOL: return "fsol";
        case Algorithm::SGDMomentum: return "sgdm";
        case Algorithm::AdaGrad: return "adagrad";
        case Algorithm::TruncatedGradient: return "tgd";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    if (name == "pac" || name == "pa2") return Algorithm::PA2;
    if (name == "pa1") return Algorithm::PA1;
    if (name == "fsol") return Algorithm::FSOL;
    if (name == "sgdm") return Algorithm::SGDMomentum;
    if (name == "adagrad") return Algorithm::AdaGrad;
    if (name == "tgd") return Algorithm::TruncatedGradient;
    return std::nullopt;
}

void validate(Algorithm algo, const Hyperparams& hp) {
    const auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    switch (algo) {
        case Algorithm::PA1:
        case Algorithm::PA2:
            require(hp.c_err > 0.0 && std::isfinite(hp.c_err), "c_err must be positive and finite");
            break;
        case Algorithm::FSOL:
            require(hp.eta > 0.0 && std::isfinite(hp.eta), "eta must be positive and finite");
            require(hp.lambda >= 0.0 && std::isfinite(hp.lambda), "lambda must be non-negative");
            break;
        case Algorithm::SGDMomentum:
            require(hp.rate > 0.0 && std::isfinite(hp.rate), "rate must be positive and finite");
            require(hp.momentum >= 0.0 && hp.momentum < 1.0, "momentum must lie in [0, 1)");
            break;
        case Algorithm::AdaGrad:
            require(hp.rate > 0.0 && std::isfinite(hp.rate), "rate must be positive and finite");
            break;
        case Algorithm::TruncatedGradient:
            require(hp.rate > 0.0 && std::isfinite(hp.rate), "rate must be positive and finite");
            require(hp.gravity >= 0.0 && std::isfinite(hp.gravity), "gravity must be non-negative");
            require(hp.period >= 1, "period must be at least 1");
            break;
    }
}

void pa2_update(WeightVector& w, const SparseVector& x, Label y, double c_err) {
    const double loss = hinge_loss(w, x, y);
    if (loss <= 0.0) return;
    const double tau = loss / (sq_norm(x) + 1.0 / (2.0 * c_err));
    axpy_sparse(w, tau * sign(y), x);
}

void pa1_update(WeightVector& w, const SparseVector& x, Label y, double c_err) {
    const double loss = hinge_loss(w, x, y);
    const double norm2 = sq_norm(x);
    if (loss <= 0.0 || norm2 == 0.0) return;
    const double tau = std::min(c_err, loss / norm2);
    axpy_sparse(w, tau * sign(y), x);
}

double soft_threshold(double v, double threshold) noexcept {
    return std::copysign(std::max(std::abs(v) - threshold, 0.0), v);
}

void fsol_update(FsolState& state, const SparseVector& x, Label y, double eta, double lambda) {
    if (x.empty()) return;
    axpy_sparse(state.theta, eta * sign(y), x);
    state.w.ensure_dimension(x.extent());
    const double threshold = eta * lambda;
    const auto theta = state.theta.coeffs();
    auto w = state.w.coeffs();
    for (const Feature& f : x.entries()) w[f.index] = soft_threshold(theta[f.index], threshold);
}

void sgd_momentum_step(MomentumState& state, const SparseVector& x, Label y, double rate,
                       double momentum) {
    const bool margin_error = hinge_loss(state.w, x, y) > 0.0;
    const std::size_t dim = std::max({state.w.dimension(), state.velocity.dimension(), x.extent()});
    state.w.ensure_dimension(dim);
    state.velocity.ensure_dimension(dim);
    auto v = state.velocity.coeffs();
    for (double& vi : v) vi *= momentum;
    if (margin_error) {
        const double step = rate * sign(y);
        for (const Feature& f : x.entries()) v[f.index] += step * f.value;
    }
    auto w = state.w.coeffs();
    for (std::size_t i = 0; i < dim; ++i) w[i] += v[i];
}

void adagrad_step(AdagradState& state, const SparseVector& x, Label y, double rate) {
    if (hinge_loss(state.w, x, y) <= 0.0) return;
    state.w.ensure_dimension(x.extent());
    state.sum_sq.ensure_dimension(x.extent());
    auto w = state.w.coeffs();
    auto g2 = state.sum_sq.coeffs();
    const double s = sign(y);
    for (const Feature& f : x.entries()) {
        const double g = s * f.value;
        g2[f.index] += g * g;
        w[f.index] += rate * g / std::sqrt(g2[f.index] + kAdagradEpsilon);
    }
}

void truncated_gradient_step(TruncatedState& state, const SparseVector& x, Label y, double rate,
                             double gravity, std::uint64_t period) {
    if (hinge_loss(state.w, x, y) > 0.0) axpy_sparse(state.w, rate * sign(y), x);
    ++state.steps;
    if (period != 0 && state.steps % period == 0 && gravity > 0.0) {
        const double shrink = rate * gravity;
        for (double& wi : state.w.coeffs()) wi = soft_threshold(wi, shrink);
    }
}

Learner::Learner(Algorithm algo, const Hyperparams& hp, std::size_t dimension)
    : algo_(algo), hp_(hp) {
    validate(algo, hp);
    switch (algo) {
        case Algorithm::PA1:
        case Algorithm::PA2:
            state_ = WeightVector(dimension);
            break;
        case Algorithm::FSOL:
            state_ = FsolState{WeightVector(dimension), WeightVector(dimension)};
            break;
        case Algorithm::SGDMomentum:
            state_ = MomentumState{WeightVector(dimension), WeightVector(dimension)};
            break;
        case Algorithm::AdaGrad:
            state_ = AdagradState{WeightVector(dimension), WeightVector(dimension)};
            break;
        case Algorithm::TruncatedGradient:
            state_ = TruncatedState{WeightVector(dimension), 0};
            break;
    }
}

void Learner::update(const SparseVector& x, Label y) {
    switch (algo_) {
        case Algorithm::PA1: pa1_update(std::get<WeightVector>(state_), x, y, hp_.c_err); break;
        case Algorithm::PA2: pa2_update(std::get<WeightVector>(state_), x, y, hp_.c_err); break;
        case Algorithm::FSOL: fsol_update(std::get<FsolState>(state_), x, y, hp_.eta, hp_.lambda); break;
        case Algorithm::SGDMomentum:
            sgd_momentum_step(std::get<MomentumState>(state_), x, y, hp_.rate, hp_.momentum);
            break;
        case Algorithm::AdaGrad: adagrad_step(std::get<AdagradState>(state_), x, y, hp_.rate); break;
        case Algorithm::TruncatedGradient:
            truncated_gradient_step(std::get<TruncatedState>(state_), x, y, hp_.rate, hp_.gravity,
                                    hp_.period);
            break;
    }
}

const WeightVector& Learner::weights() const noexcept {
    return std::visit(
        [](const auto& s) -> const WeightVector& {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, WeightVector>) {
                return s;
            } else {
                return s.w;
            }
        },
        state_);
}

}  // namespace wat
