// SPDX-License-Identifier: Apache-2.0

#include "mmrt/channel.hpp"
#include "mmrt/scenarios.hpp"
#include "mmrt/tracer.hpp"

#include <benchmark/benchmark.h>

using namespace mmrt;

namespace {

const ScenarioBundle& lroom()
{
    static const ScenarioBundle b = make_lroom();
    return b;
}

// Args: max reflection order, threshold in dB (0 means -inf).
void BM_TraceTimestep(benchmark::State& state)
{
    const auto& b = lroom();
    const PreparedScene ps(b.scene);
    TraceConfig cfg;
    cfg.max_reflection_order = static_cast<int>(state.range(0));
    if (state.range(1) != 0)
        cfg.relative_threshold_db = static_cast<double>(state.range(1));
    std::size_t i = 0, mpcs = 0;
    for (auto _ : state) {
        const auto r = trace_timestep(ps, b.tx.position, b.rx.positions[i], cfg);
        mpcs += r.mpcs.size();
        i = (i + 97) % b.rx.size();
    }
    state.counters["candidates/step"] =
        static_cast<double>(reflection_tree_candidate_count(b.scene.triangles.size(), cfg.max_reflection_order));
    state.counters["mpcs/step"] = benchmark::Counter(static_cast<double>(mpcs), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_TraceTimestep)
    ->ArgsProduct({{1, 2, 3, 4}, {0, -40, -25, -15}})
    ->ArgNames({"eta", "gamma"})
    ->Unit(benchmark::kMicrosecond);

void BM_BeamformingSnr(benchmark::State& state)
{
    const auto& b = lroom();
    TraceConfig cfg;
    cfg.max_reflection_order = static_cast<int>(state.range(0));
    const auto r = trace_timestep(b.scene, b.tx.position, b.rx.positions[100], cfg);
    const LinkBudget link;
    for (auto _ : state) {
        const auto h = assemble_channel(r.mpcs, ArrayConfig{8, 8}, ArrayConfig{4, 4}, link.wavelength_m());
        benchmark::DoNotOptimize(beamforming_snr_db(h, link));
    }
    state.counters["mpcs"] = static_cast<double>(r.mpcs.size());
}
BENCHMARK(BM_BeamformingSnr)->DenseRange(1, 4)->ArgName("eta")->Unit(benchmark::kMicrosecond);

void BM_Obstruction(benchmark::State& state)
{
    const auto& b = lroom();
    const PreparedScene ps(b.scene);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ps.obstructed(b.tx.position, b.rx.positions[i]));
        i = (i + 31) % b.rx.size();
    }
}
BENCHMARK(BM_Obstruction);

} // namespace

BENCHMARK_MAIN();
