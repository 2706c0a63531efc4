// Serial reference kernels against their OpenMP counterparts.

#include <vector>

#include <benchmark/benchmark.h>

#include "gosset/calibration.hpp"
#include "gosset/kernels.hpp"
#include "gosset/sampling.hpp"

using namespace gosset;

namespace {

std::vector<ModelPoint> strike_grid(int n) {
    std::vector<ModelPoint> pts;
    pts.reserve(n);
    const auto d = ReturnDistribution::student_t(3.0);
    for (int i = 0; i < n; ++i) pts.push_back({d, 0.0, 0.999, MarketParams{50.0, 100.0 * i / (n - 1), 0.03, 0.3}});
    return pts;
}

void BM_PriceGridSerial(benchmark::State& st) {
    const auto pts = strike_grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(price_grid_serial(pts));
}

void BM_PriceGrid(benchmark::State& st) {
    const auto pts = strike_grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(price_grid(pts));
}

void BM_GreeksGridSerial(benchmark::State& st) {
    const auto pts = strike_grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(greeks_grid_serial(pts));
}

void BM_GreeksGrid(benchmark::State& st) {
    const auto pts = strike_grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(greeks_grid(pts));
}

const int kDrops[] = {0, 2, 4};

void BM_WindowVolatilitiesSerial(benchmark::State& st) {
    const auto xs = sample_returns(ReturnDistribution::student_t(4.0), 22 * st.range(0), 1);
    for (auto _ : st) benchmark::DoNotOptimize(window_volatilities_serial(xs, 22, kDrops));
}

void BM_WindowVolatilities(benchmark::State& st) {
    const auto xs = sample_returns(ReturnDistribution::student_t(4.0), 22 * st.range(0), 1);
    for (auto _ : st) benchmark::DoNotOptimize(window_volatilities(xs, 22, kDrops));
}

void BM_SimulateSerial(benchmark::State& st) {
    const auto d = ReturnDistribution::student_t(3.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(simulate_window_study_serial(d, 22, kDrops, static_cast<int>(st.range(0)), 42));
}

void BM_Simulate(benchmark::State& st) {
    const auto d = ReturnDistribution::student_t(3.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(simulate_window_study(d, 22, kDrops, static_cast<int>(st.range(0)), 42));
}

}  // namespace

BENCHMARK(BM_PriceGridSerial)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PriceGrid)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreeksGridSerial)->Arg(51)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreeksGrid)->Arg(51)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowVolatilitiesSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowVolatilities)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
