#include <benchmark/benchmark.h>

#include <vector>

#include "loadcast/anomaly.hpp"
#include "loadcast/losses.hpp"
#include "loadcast/lstm.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/seasons.hpp"
#include "loadcast/synthgen.hpp"
#include "loadcast/windows.hpp"

using namespace loadcast;

namespace {

std::vector<double> scaled_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> pts(n);
    for (auto& p : pts) p = rng.next_gaussian();
    return pts;
}

WindowedSample sample_window(std::uint64_t seed) {
    Rng rng(seed);
    WindowedSample s;
    s.width = 4;
    s.inputs.resize(4 * kNumFeatures);
    for (auto& x : s.inputs) x = rng.uniform(-1.5, 1.5);
    s.target = rng.uniform(-1.0, 1.0);
    return s;
}

}  // namespace

static void BM_Dbscan1d(benchmark::State& state) {
    const auto pts = scaled_points(static_cast<std::size_t>(state.range(0)), 1);
    const DbscanParams params;
    for (auto _ : state) {
        auto labeling = dbscan(pts, params);
        benchmark::DoNotOptimize(labeling.labels.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dbscan1d)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

static void BM_BatchLossAl1(benchmark::State& state) {
    const auto errors = scaled_points(static_cast<std::size_t>(state.range(0)), 2);
    LossSpec spec;
    spec.kind = LossKind::AL1;
    for (auto _ : state) benchmark::DoNotOptimize(batch_loss(errors, spec));
}
BENCHMARK(BM_BatchLossAl1)->Arg(1 << 10)->Arg(1 << 14);

static void BM_LstmForward(benchmark::State& state) {
    const LstmModel model = init_lstm_model(LstmConfig{}, 3);
    const WindowedSample sample = sample_window(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(lstm_forward(model, sample.inputs, false, nullptr, nullptr));
}
BENCHMARK(BM_LstmForward);

static void BM_LstmForwardBackward(benchmark::State& state) {
    const LstmModel model = init_lstm_model(LstmConfig{}, 5);
    const WindowedSample sample = sample_window(6);
    LstmParams grad = zeros_like(model.params);
    ForwardCache cache;
    Rng dropout_rng(7);
    for (auto _ : state) {
        lstm_forward(model, sample.inputs, true, &dropout_rng, &cache);
        lstm_backward_into(model, cache, 1.0, grad);
        benchmark::DoNotOptimize(grad.head.b);
    }
}
BENCHMARK(BM_LstmForwardBackward);

static void BM_SynthYear(benchmark::State& state) {
    SynthSpec spec;
    spec.start_year = 2018;
    spec.end_year = 2018;
    for (auto _ : state) {
        auto series = generate(spec);
        benchmark::DoNotOptimize(series.records.data());
    }
}
BENCHMARK(BM_SynthYear);

static void BM_RobustScalerFit(benchmark::State& state) {
    SynthSpec spec;
    const MultiSeries series = generate(spec);
    for (auto _ : state) {
        auto params = fit_robust_scaler(series, 2018);
        benchmark::DoNotOptimize(params.median.data());
    }
}
BENCHMARK(BM_RobustScalerFit);

static void BM_MakeWindows(benchmark::State& state) {
    SynthSpec spec;
    spec.start_year = 2018;
    spec.end_year = 2019;
    MultiSeries series = generate(spec);
    const SeasonalDataset dataset = whole_series_dataset(series, RobustScalerParams{});
    for (auto _ : state) {
        auto samples = make_windows(dataset, 4);
        benchmark::DoNotOptimize(samples.data());
    }
}
BENCHMARK(BM_MakeWindows);

BENCHMARK_MAIN();
