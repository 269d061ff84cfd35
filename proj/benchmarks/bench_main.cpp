#include <benchmark/benchmark.h>
#include <descore/bootstrap.hpp>
#include <descore/decorrelate.hpp>
#include <descore/simulation.hpp>
#include <descore/solvers.hpp>

#include <cmath>
#include <random>

using namespace descore;

namespace {

SimDataset toeplitz_data(Index n, Index d) {
    SimConfig c;
    c.n = n;
    c.d = d;
    return generate_dataset(c, 17);
}

void BM_Lasso(benchmark::State& state) {
    SimDataset sim = toeplitz_data(200, state.range(0));
    const double lambda = 2.0 * std::sqrt(std::log(static_cast<double>(sim.data.d())) / 200.0);
    for (auto _ : state) {
        PenalizedFit f = fit_lasso(sim.data, ModelFamily::gaussian(), PenaltyConfig::l1(lambda));
        benchmark::DoNotOptimize(f.beta.data());
    }
}
BENCHMARK(BM_Lasso)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_LogisticLasso(benchmark::State& state) {
    SimConfig c;
    c.family = SimFamily::Logistic;
    SimDataset sim = generate_dataset(c, 17);
    for (auto _ : state) {
        PenalizedFit f = fit_lasso(sim.data, ModelFamily::logistic(), PenaltyConfig::l1(0.05));
        benchmark::DoNotOptimize(f.beta.data());
    }
}
BENCHMARK(BM_LogisticLasso)->Unit(benchmark::kMillisecond);

void BM_Dantzig(benchmark::State& state) {
    SimDataset sim = toeplitz_data(200, state.range(0) + 1);
    const Matrix X = sim.data.nuisance_columns();
    const Matrix A = X.transpose() * X / 200.0;
    const Vector b = X.transpose() * sim.data.interest_columns().col(0) / 200.0;
    const double lp = lambda_prime_rule(200, sim.data.d());
    for (auto _ : state) {
        DantzigFit f = fit_dantzig(A, b, lp);
        benchmark::DoNotOptimize(f.w.data());
    }
}
BENCHMARK(BM_Dantzig)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DecorrelatedFit(benchmark::State& state) {
    SimDataset sim = toeplitz_data(200, 100);
    TuningPolicy t;
    t.lambda = 0.1;
    const auto method = static_cast<DirectionMethod>(state.range(0));
    for (auto _ : state) {
        DecorrelatedFit f = build_decorrelated_fit(sim.data, ModelFamily::gaussian(), PenaltyConfig{}, method, t);
        benchmark::DoNotOptimize(f.s_hat.data());
    }
}
BENCHMARK(BM_DecorrelatedFit)
    ->Arg(static_cast<int>(DirectionMethod::LassoQuadratic))
    ->Arg(static_cast<int>(DirectionMethod::Dantzig))
    ->Unit(benchmark::kMillisecond);

void BM_MultiplierBootstrap(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    Matrix rows(200, state.range(0));
    for (Index i = 0; i < rows.size(); ++i) rows.data()[i] = nd(rng);
    for (auto _ : state) benchmark::DoNotOptimize(multiplier_bootstrap(rows, 1000, 5));
}
BENCHMARK(BM_MultiplierBootstrap)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
