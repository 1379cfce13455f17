#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wat/driver.hpp"
#include "wat/memory.hpp"

using wat::RunConfig;
using wat::WeightVector;

namespace {

wat::TrainTestSplit noisy_split(std::size_t dim, std::size_t n, double flip, std::uint64_t seed) {
    const auto ds = wat::synth_noisy_stream(fixture::noisy(dim, n, flip, seed));
    return wat::split_and_shuffle(ds.examples, 0.7, seed);
}

std::vector<std::uint64_t> own_schedule(std::uint64_t n, std::uint64_t target) {
    const std::uint64_t stride = std::max<std::uint64_t>(1, n / target);
    std::vector<std::uint64_t> s;
    for (std::uint64_t t = 0; t <= n; t += stride) s.push_back(t);
    if (s.back() != n) s.push_back(n);
    return s;
}

// Hand-written WAT loop for PA learners.
std::vector<wat::CheckpointRecord> replay_wat(const RunConfig& c, const wat::TrainTestSplit& d, std::size_t dim) {
    wat::Learner learner(c.algorithm, c.hyper, dim);
    wat::Reservoir res(c.reservoir_size, c.weighting, wat::reservoir_seed(c.seed));
    const auto sched = own_schedule(d.train.size(), c.checkpoints);
    std::vector<wat::CheckpointRecord> out;
    std::size_t next = 0;
    std::uint64_t survival = 0;
    std::uint64_t birth = 0;
    auto record = [&](std::uint64_t t) {
        const WeightVector& w = learner.weights();
        const WeightVector ens = res.empty()
                                     ? w
                                     : *wat::build_ensemble(res.slots(), {c.averaging, c.voting_zero}, c.weighting);
        out.push_back({t, wat::accuracy(w, d.test), wat::accuracy(ens, d.test), wat::sparsity(w, dim),
                       wat::sparsity(ens, dim)});
    };
    if (sched[0] == 0) {
        record(0);
        ++next;
    }
    for (std::uint64_t t = 1; t <= d.train.size(); ++t) {
        const auto& ex = d.train[t - 1];
        if (wat::hinge_loss(learner.weights(), ex.x, ex.y) > 0.0) {
            res.offer(learner.weights(), survival, birth);
            learner.update(ex.x, ex.y);
            survival = 0;
            birth = t;
        } else {
            ++survival;
        }
        if (next < sched.size() && sched[next] == t) {
            record(t);
            ++next;
        }
    }
    return out;
}

double tail_sd(const wat::AccuracyCurve& c) {
    std::vector<double> v;
    for (std::size_t i = c.size() / 2; i < c.size(); ++i) v.push_back(c[i].accuracy);
    return oracle::sample_sd(v);
}

}  // namespace

TEST_CASE("checkpoint schedule examples") {
    const auto a = wat::checkpoint_schedule(1000, 200);
    CHECK(a.size() == 201);
    CHECK(a[1] == 5);
    CHECK(a.back() == 1000);
    const auto b = wat::checkpoint_schedule(100, 200);
    CHECK(b.size() == 101);
    CHECK(b[37] == 37);
    CHECK(wat::checkpoint_schedule(7, 2) == std::vector<std::uint64_t>{0, 3, 6, 7});
    for (std::uint64_t n : {1u, 2u, 13u, 999u, 20001u}) {
        const auto s = wat::checkpoint_schedule(n, 200);
        CHECK(s.front() == 0);
        CHECK(s.back() == n);
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
    }
}

TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(wat::validate(c));
    c.reservoir_size = 0;
    CHECK_THROWS_AS(wat::validate(c), std::invalid_argument);
    c = {};
    c.checkpoints = 1;
    CHECK_THROWS_AS(wat::validate(c), std::invalid_argument);
    c = {};
    c.voting_zero = true;
    CHECK_THROWS_AS(wat::validate(c), std::invalid_argument);
    c.baseline = wat::BaselineScheme::TopK;
    CHECK_NOTHROW(wat::validate(c));
    c.wrs = true;
    CHECK_THROWS_AS(wat::validate(c), std::invalid_argument);
    c = {};
    c.baseline = wat::BaselineScheme::ExponentialAverage;
    c.gamma = 0.0;
    CHECK_THROWS_AS(wat::validate(c), std::invalid_argument);
    for (auto b : {wat::BaselineScheme::None, wat::BaselineScheme::TopK, wat::BaselineScheme::MovingAverage,
                   wat::BaselineScheme::ExponentialAverage}) {
        CHECK(wat::parse_baseline(wat::to_string(b)) == b);
    }
}

TEST_CASE("property: WAT trace equals a hand-written replay") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto d = noisy_split(30, 1400, 0.1, seed);
        RunConfig c;
        c.algorithm = seed % 2 ? wat::Algorithm::PA2 : wat::Algorithm::FSOL;
        c.hyper.lambda = 0.02;
        c.wrs = true;
        c.reservoir_size = 1 + 3 * seed;
        c.weighting = seed == 3 ? wat::WeightingScheme::Exponential : wat::WeightingScheme::Standard;
        c.averaging = seed == 2 ? wat::AveragingScheme::Weighted : wat::AveragingScheme::Simple;
        c.voting_zero = seed == 4;
        c.seed = seed;
        c.checkpoints = 40;
        const auto trace = wat::run_wat(c, d.train, d.test);
        CHECK(trace.ensemble_tag == "wrs");
        CHECK(trace.records == replay_wat(c, d, trace.dimension));
    }
}

TEST_CASE("property: base model equals a replay of the raw update rule") {
    const auto d = noisy_split(25, 1000, 0.05, 8);
    RunConfig c;
    c.algorithm = wat::Algorithm::PA1;
    c.hyper.c_err = 0.3;
    c.checkpoints = 1000;
    const auto trace = wat::run_baseline(c, d.train, d.test);
    WeightVector w(trace.dimension);
    std::size_t r = 1;
    for (std::size_t t = 1; t <= d.train.size(); ++t) {
        wat::pa1_update(w, d.train[t - 1].x, d.train[t - 1].y, 0.3);
        REQUIRE(trace.records[r].timestep == t);
        CHECK(trace.records[r].base_acc == wat::accuracy(w, d.test));
        CHECK(trace.records[r].base_sparsity == wat::sparsity(w, trace.dimension));
        ++r;
    }
}

TEST_CASE("offers equal aggressive steps and WAT leaves the base trajectory alone") {
    const auto d = noisy_split(100, 5000, 0.05, 2);
    for (auto algo : {wat::Algorithm::PA2, wat::Algorithm::FSOL, wat::Algorithm::SGDMomentum}) {
        RunConfig c;
        c.algorithm = algo;
        c.seed = 2;
        c.wrs = true;
        const auto wat_trace = wat::run_trial(c, d.train, d.test);
        c.wrs = false;
        const auto base_trace = wat::run_trial(c, d.train, d.test);
        CHECK(wat_trace.summary.offers == wat_trace.summary.aggressive_steps);
        CHECK(wat_trace.summary.offers > 0);
        CHECK(wat_trace.base_curve() == base_trace.base_curve());
        CHECK(base_trace.summary.offers == 0);
        CHECK(base_trace.ensemble_tag.empty());
        CHECK(base_trace.ensemble_curve() == base_trace.base_curve());
    }
}

TEST_CASE("dispatch") {
    const auto d = noisy_split(20, 600, 0.05, 3);
    RunConfig c;
    c.algorithm = wat::Algorithm::SGDMomentum;
    c.wrs = true;
    CHECK(wat::run_trial(c, d.train, d.test) == wat::run_wat_pseudo_passive(c, d.train, d.test));
    CHECK_THROWS_AS(wat::run_wat(c, d.train, d.test), std::invalid_argument);
    c.algorithm = wat::Algorithm::PA2;
    CHECK(wat::run_trial(c, d.train, d.test) == wat::run_wat(c, d.train, d.test));
    CHECK_THROWS_AS(wat::run_wat_pseudo_passive(c, d.train, d.test), std::invalid_argument);
    CHECK_THROWS_AS(wat::run_trial(c, d.train, std::vector<wat::Example>{}), std::invalid_argument);
}

TEST_CASE("same seed, same trace; different seed, different trace") {
    const auto d = noisy_split(50, 3000, 0.05, 4);
    RunConfig c;
    c.wrs = true;
    c.seed = 4;
    const auto a = wat::run_trial(c, d.train, d.test);
    const auto b = wat::run_trial(c, d.train, d.test);
    CHECK(wat::trace_to_json(a) == wat::trace_to_json(b));
    c.seed = 5;
    CHECK(wat::trace_to_json(wat::run_trial(c, d.train, d.test)) != wat::trace_to_json(a));
}

TEST_CASE("the ensemble falls back to the current weights while empty") {
    const auto d = noisy_split(20, 500, 0.0, 6);
    RunConfig c;
    c.wrs = true;
    const auto t = wat::run_trial(c, d.train, d.test);
    CHECK(t.records[0].ensemble_acc == t.records[0].base_acc);
    CHECK(t.records[0].ensemble_sparsity == 1.0);
    CHECK(t.records[0].base_acc == 0.0);
}

TEST_CASE("pseudo-passive offers the pre-update weights with their correct-prediction count") {
    const auto d = noisy_split(15, 400, 0.1, 7);
    RunConfig c;
    c.algorithm = wat::Algorithm::AdaGrad;
    c.baseline = wat::BaselineScheme::TopK;
    c.reservoir_size = 100000;  // keeps every offer
    c.checkpoints = 2;
    const auto trace = wat::run_baseline(c, d.train, d.test);

    // Replay: every mistake yields (weights after step t-1, correct streak, t-1).
    wat::AdagradState s{WeightVector(trace.dimension), WeightVector(trace.dimension)};
    std::vector<wat::Candidate> expected;
    std::uint64_t streak = 0;
    for (std::uint64_t t = 1; t <= d.train.size(); ++t) {
        const auto& ex = d.train[t - 1];
        if (wat::sign(ex.y) * wat::dot(s.w, ex.x) > 0.0) {
            ++streak;
        } else {
            wat::Candidate cand;
            cand.weights = s.w;
            cand.survival = streak;
            cand.weight = static_cast<double>(streak);
            cand.birth_timestep = t - 1;
            expected.push_back(std::move(cand));
            streak = 0;
        }
        wat::adagrad_step(s, ex.x, ex.y, c.hyper.rate);
    }
    CHECK(trace.summary.aggressive_steps == expected.size());
    CHECK(expected.front().birth_timestep == 0);
    CHECK(expected.front().survival == 0);
    const auto ens = wat::build_ensemble(expected, {}, wat::WeightingScheme::Standard);
    CHECK(trace.records.back().ensemble_acc == wat::accuracy(*ens, d.test));
}

TEST_CASE("moving and exponential averages of width one reproduce the base curve") {
    const auto d = noisy_split(40, 3000, 0.05, 9);
    RunConfig c;
    c.seed = 9;
    const auto base = wat::run_baseline(c, d.train, d.test);
    c.baseline = wat::BaselineScheme::MovingAverage;
    c.reservoir_size = 1;
    const auto mov = wat::run_baseline(c, d.train, d.test);
    c.baseline = wat::BaselineScheme::ExponentialAverage;
    c.gamma = 1.0;
    const auto ex = wat::run_baseline(c, d.train, d.test);
    CHECK(mov.ensemble_curve() == base.base_curve());
    CHECK(ex.ensemble_curve() == base.base_curve());
    CHECK(mov.base_curve() == base.base_curve());
    CHECK(mov.ensemble_tag == "movavg");
    CHECK(ex.ensemble_tag == "expavg");
}

TEST_CASE("separable stream: the ensemble catches up with the converged base model") {
    const auto ds = wat::synth_noisy_stream(fixture::noisy(20, 20000, 0.0, 10));
    const auto d = wat::split_and_shuffle(ds.examples, 0.7, 10);
    RunConfig c;
    c.wrs = true;
    c.seed = 10;
    const auto t = wat::run_trial(c, d.train, d.test);
    CHECK(t.summary.final_base_acc > 0.97);
    CHECK(std::abs(t.summary.final_ensemble_acc - t.summary.final_base_acc) <= 0.02);
    CHECK(t.summary.ensemble_members > 0);
}

TEST_CASE("K=1 reservoir steadies the accuracy curve") {
    int steadier = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = noisy_split(100, 20000, 0.05, seed);
        RunConfig c;
        c.wrs = true;
        c.reservoir_size = 1;
        c.seed = seed;
        const auto t = wat::run_trial(c, d.train, d.test);
        steadier += tail_sd(t.ensemble_curve()) < tail_sd(t.base_curve());
    }
    CHECK(steadier >= 4);
}

TEST_CASE("pseudo-passive WAT steadies momentum SGD") {
    int steadier = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = noisy_split(100, 20000, 0.05, seed);
        RunConfig c;
        c.algorithm = wat::Algorithm::SGDMomentum;
        c.wrs = true;
        c.seed = seed;
        const auto t = wat::run_trial(c, d.train, d.test);
        steadier += tail_sd(t.ensemble_curve()) < tail_sd(t.base_curve());
    }
    CHECK(steadier >= 4);
}

TEST_CASE("pseudo-passive WAT tracks an already steady truncated gradient learner") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto d = noisy_split(100, 20000, 0.05, seed);
        RunConfig c;
        c.algorithm = wat::Algorithm::TruncatedGradient;
        c.wrs = true;
        c.seed = seed;
        const auto t = wat::run_trial(c, d.train, d.test);
        CHECK(std::abs(t.summary.final_ensemble_acc - t.summary.final_base_acc) <= 0.01);
    }
}
