#include <benchmark/benchmark.h>

#include "gsdsce/baselines.hpp"
#include "gsdsce/gsd_estimator.hpp"
#include "gsdsce/numkit.hpp"

namespace {

using namespace gsdsce;

// Evenly spread in-bound delays so every run takes the full pipeline.
PilotObservation observation(std::size_t paths, const OfdmConfig& cfg) {
    CVector gains;
    std::vector<double> delays;
    for (std::size_t l = 0; l < paths; ++l) {
        const double t = (static_cast<double>(l) + 0.3) / static_cast<double>(paths);
        gains.push_back(std::polar(1.0 - 0.05 * static_cast<double>(l), 2.4 * static_cast<double>(l)));
        delays.push_back(0.95 * t * cfg.unambiguous_delay_s());
    }
    return pilot_observation(MultipathChannel(gains, delays), cfg);
}

void BM_GsdEstimate(benchmark::State& state) {
    const OfdmConfig cfg;
    const auto s = observation(static_cast<std::size_t>(state.range(0)), cfg);
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(gsd::estimate(s, cfg));
        } catch (const Error&) {
            state.SkipWithError("estimation failed");
            break;
        }
    }
}
BENCHMARK(BM_GsdEstimate)->DenseRange(1, 8);

void BM_OmpEstimate(benchmark::State& state) {
    const OfdmConfig cfg;
    const auto s = observation(4, cfg);
    const baselines::OmpOptions opts{5000, 4, 1e-8};
    const baselines::OmpDictionary dict(cfg, opts.grid_size);
    for (auto _ : state) benchmark::DoNotOptimize(baselines::omp_estimate(s, cfg, dict, opts));
}
BENCHMARK(BM_OmpEstimate);

void BM_OmpDictionary(benchmark::State& state) {
    const OfdmConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(baselines::OmpDictionary(cfg, 5000));
}
BENCHMARK(BM_OmpDictionary);

void BM_CubicInterp(benchmark::State& state) {
    const OfdmConfig cfg;
    const auto s = observation(4, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(baselines::cubic_interp_estimate(s, cfg));
}
BENCHMARK(BM_CubicInterp);

void BM_PolyRoots(benchmark::State& state) {
    const auto degree = static_cast<std::size_t>(state.range(0));
    CVector roots;
    for (std::size_t k = 0; k < degree; ++k) {
        roots.push_back(std::polar(1.0, -0.7 * static_cast<double>(k) - 0.1));
    }
    const auto p = numkit::ComplexPolynomial::from_roots(roots);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::poly_roots(p));
}
BENCHMARK(BM_PolyRoots)->DenseRange(2, 8, 2);

}  // namespace

BENCHMARK_MAIN();
