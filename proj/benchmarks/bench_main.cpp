#include "mdpalign/multitask.hpp"
#include "mdpalign/search.hpp"
#include "mdpalign/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace mdpalign;

PlantedPair pair_for(int base_states, int split) {
    PlantSpec spec;
    spec.base_states = base_states;
    spec.base_actions = 2;
    spec.split_factor_states = split;
    spec.permute = true;
    spec.rng_seed = 1;
    return generate_planted(spec);
}

void BM_Solve(benchmark::State& state) {
    const auto m = pair_for(static_cast<int>(state.range(0)), 2).mx;
    for (auto _ : state) benchmark::DoNotOptimize(solve(m));
    state.SetComplexityN(m.state_count());
}
BENCHMARK(BM_Solve)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_EnumerateReductions(benchmark::State& state) {
    const auto p = pair_for(static_cast<int>(state.range(0)), 2);
    const auto x = solve(p.mx);
    const auto y = solve(p.my);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_reductions(x, y));
}
BENCHMARK(BM_EnumerateReductions)->DenseRange(2, 4);

void BM_ObjectiveEvaluation(benchmark::State& state) {
    const auto p = pair_for(static_cast<int>(state.range(0)), 2);
    const auto x = solve(p.mx);
    const auto y = solve(p.my);
    const auto pi_y = covering_policy(y.opt);
    const AlignmentObjective objective(x, y, pi_y, 10.0);
    const auto maps = alignment_from_reduction(p.planted, x.mdp.action_count(), y.opt);
    for (auto _ : state) benchmark::DoNotOptimize(objective(maps));
}
BENCHMARK(BM_ObjectiveEvaluation)->RangeMultiplier(2)->Range(4, 32);

void BM_SearchAlignment(benchmark::State& state) {
    const auto p = pair_for(3, 2);
    const auto x = solve(p.mx);
    const auto y = solve(p.my);
    const auto pi_y = covering_policy(y.opt);
    SearchConfig cfg;
    cfg.max_iters = state.range(0);
    cfg.restarts = 1;
    cfg.stop_when_met = false;
    for (auto _ : state) benchmark::DoNotOptimize(search_alignment(x, y, pi_y, cfg));
}
BENCHMARK(BM_SearchAlignment)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MaximalReduction(benchmark::State& state) {
    const auto x = solve(pair_for(static_cast<int>(state.range(0)), 2).mx);
    for (auto _ : state) benchmark::DoNotOptimize(maximal_reduction(x));
}
BENCHMARK(BM_MaximalReduction)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_SequenceDistribution(benchmark::State& state) {
    const auto m = pair_for(3, 2).mx;
    const auto pi = uniform_policy(m.state_count(), m.action_count());
    for (auto _ : state) benchmark::DoNotOptimize(sequence_distribution(m, pi, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SequenceDistribution)->DenseRange(2, 8, 2);

} // namespace

BENCHMARK_MAIN();
