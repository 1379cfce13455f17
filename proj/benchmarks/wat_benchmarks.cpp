#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "wat/data_io.hpp"
#include "wat/ensemble.hpp"
#include "wat/learners.hpp"
#include "wat/reservoir.hpp"

namespace {

std::vector<wat::Example> stream(std::size_t dim, double density, std::size_t n) {
    wat::SynthParams p;
    p.dimension = dim;
    p.density = density;
    p.n_examples = n;
    p.flip_prob = 0.05;
    p.seed = 3;
    return wat::synth_noisy_stream(p).examples;
}

void BM_LearnerUpdate(benchmark::State& state) {
    const auto algo = static_cast<wat::Algorithm>(state.range(0));
    const auto data = stream(10000, 0.01, 4096);
    wat::Hyperparams hp;
    hp.lambda = 0.01;
    wat::Learner learner(algo, hp, 10000);
    std::size_t i = 0;
    for (auto _ : state) {
        learner.update(data[i].x, data[i].y);
        i = (i + 1) % data.size();
    }
    state.SetLabel(std::string(wat::to_string(algo)));
}
BENCHMARK(BM_LearnerUpdate)
    ->Arg(static_cast<int>(wat::Algorithm::PA2))
    ->Arg(static_cast<int>(wat::Algorithm::PA1))
    ->Arg(static_cast<int>(wat::Algorithm::FSOL))
    ->Arg(static_cast<int>(wat::Algorithm::SGDMomentum))
    ->Arg(static_cast<int>(wat::Algorithm::AdaGrad))
    ->Arg(static_cast<int>(wat::Algorithm::TruncatedGradient));

void BM_ReservoirOffer(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    wat::WeightVector w(static_cast<std::size_t>(state.range(1)));
    wat::Reservoir reservoir(k, wat::WeightingScheme::Standard, 11);
    std::uint64_t t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reservoir.offer(w, t % 37, t));
        ++t;
    }
}
BENCHMARK(BM_ReservoirOffer)->Args({64, 100})->Args({64, 10000})->Args({256, 10000});

void BM_BuildEnsemble(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 10000;
    const auto data = stream(dim, 0.01, 2000);
    wat::Learner learner(wat::Algorithm::PA2, {}, dim);
    wat::Reservoir reservoir(k, wat::WeightingScheme::Standard, 5);
    std::uint64_t t = 0;
    for (const auto& ex : data) {
        reservoir.offer(learner.weights(), t % 13, t);
        learner.update(ex.x, ex.y);
        ++t;
    }
    const wat::EnsembleConfig config{wat::AveragingScheme::Weighted, state.range(1) != 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(wat::build_ensemble(reservoir.slots(), config, wat::WeightingScheme::Standard));
    }
}
BENCHMARK(BM_BuildEnsemble)->Args({16, 0})->Args({64, 0})->Args({64, 1});

void BM_ParseLibsvm(benchmark::State& state) {
    const auto data = stream(1000, 0.05, 2000);
    std::ostringstream out;
    wat::write_libsvm(out, data);
    const std::string text = out.str();
    for (auto _ : state) {
        std::istringstream in(text);
        benchmark::DoNotOptimize(wat::read_libsvm(in));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseLibsvm);

}  // namespace

BENCHMARK_MAIN();
