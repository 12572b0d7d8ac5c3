// Serial reference kernels against their OpenMP counterparts, plus one full
// SWAP restart. Sizes straddle kParallelMinPoints, below which the parallel
// path runs on one thread.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "swapfit/densities.hpp"
#include "swapfit/kernels.hpp"
#include "swapfit/swap.hpp"
#include "swapfit/synthetic.hpp"

using namespace swapfit;

namespace {

struct Data {
    std::vector<double> x, y;
    std::vector<std::uint8_t> z;
};

Data make_data(std::size_t n) {
    std::mt19937_64 rng(17);
    std::exponential_distribution<double> ex(0.5);
    std::normal_distribution<double> e(0.0, 0.1);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ex(rng);
        d.x.push_back(x);
        d.y.push_back(0.6 * x * x + 0.9 * x + 0.05 + e(rng));
        d.z.push_back(rng() % 2);
    }
    return d;
}

const ModelSpec kModel = ModelSpec::quadratic(0.6, 0.9, 0.05);

template <auto Kernel>
void loss_terms(benchmark::State& state) {
    const Data d = make_data(std::size_t(state.range(0)));
    std::vector<double> out(d.x.size());
    const kernels::LossInputs in{d.x, d.y, d.z};
    const LossWeights w{1.0, 1.0};
    for (auto _ : state) {
        Kernel(kernels::LossKind::Gmm, in, kModel, w, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void log_weights(benchmark::State& state) {
    const Data d = make_data(std::size_t(state.range(0)));
    std::vector<double> w1(d.x.size()), w0(d.x.size());
    const kernels::PosteriorParams p{0.01, 0.01, -0.69, -0.69, 0.5, 0.2};
    for (auto _ : state) {
        Kernel(d.x, d.y, kModel, p, w1, w0);
        benchmark::DoNotOptimize(w1.data());
        benchmark::DoNotOptimize(w0.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void swap_restart(benchmark::State& state) {
    // Intercept 1 keeps g(0) far above the noise so every y stays positive.
    SyntheticTruth t;
    t.model = ModelSpec::quadratic(0.6, 0.9, 1.0);
    t.sigma0_sq = t.sigma1_sq = 0.01;
    t.seed = 3;
    auto [pair, truth] = generate(t, std::size_t(state.range(0)), 0.5, 0.2);
    const MarginalDensities d{fit_exponential(pair.x), fit_exponential(pair.y)};
    SwapConfig cfg;
    cfg.family = Family::Quadratic;
    for (auto _ : state) {
        SwapFit f = run_single_restart(pair, cfg, d, 0);
        benchmark::DoNotOptimize(f.objective);
    }
}

}  // namespace

BENCHMARK(loss_terms<kernels::serial::loss_terms>)->Name("loss_terms/serial")->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(loss_terms<kernels::parallel::loss_terms>)->Name("loss_terms/parallel")->RangeMultiplier(8)->Range(256, 1 << 20)->UseRealTime();
BENCHMARK(log_weights<kernels::serial::log_weights>)->Name("log_weights/serial")->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(log_weights<kernels::parallel::log_weights>)->Name("log_weights/parallel")->RangeMultiplier(8)->Range(256, 1 << 20)->UseRealTime();
BENCHMARK(swap_restart)->Arg(229)->Arg(5000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
