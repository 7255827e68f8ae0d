#include "generators.hpp"
#include "oracles.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/io.hpp"
#include "mdpalign/search.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

namespace mdpalign {
namespace {

namespace gen = mdpalign::testing;
namespace oracle = mdpalign::testing::oracle;

SolvedMdp cycle(int n) {
    Table<StateId> p(n, 1);
    for (int s = 0; s < n; ++s) p(s, 0) = (s + 1) % n;
    return solve(make_mdp(p, Table<double>(n, 1, 1.0), std::vector<double>(n, 1.0 / n)));
}

PlantedPair planted(std::uint64_t seed, int base_states, int split_states, int split_actions = 1) {
    PlantSpec spec;
    spec.base_states = base_states;
    spec.split_factor_states = split_states;
    spec.split_factor_actions = split_actions;
    spec.permute = true;
    spec.rng_seed = seed;
    return generate_planted(spec);
}

TEST(EnumerateReductions, MatchesMixedRadixOracle) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed, 31);
        const auto x = solve(gen::random_mdp(rng, 1 + rng.below(4), 1 + rng.below(3)));
        const auto y = solve(gen::random_mdp(rng, 1 + rng.below(3), 1 + rng.below(3)));
        EXPECT_EQ(enumerate_reductions(x, y), oracle::all_reductions(x.mdp, x.opt, y.mdp, y.opt)) << "seed " << seed;
    }
}

TEST(EnumerateReductions, IdenticalCyclesContainIdentity) {
    const auto c = cycle(2);
    const auto all = enumerate_reductions(c, c);
    EXPECT_TRUE(std::binary_search(all.begin(), all.end(), ReductionMap{{0, 1}, {0}}));
}

TEST(EnumerateReductions, IncompatibleCycleLengthsHaveNone) {
    EXPECT_TRUE(enumerate_reductions(cycle(3), cycle(2)).empty());
    EXPECT_TRUE(oracle::all_reductions(cycle(3).mdp, cycle(3).opt, cycle(2).mdp, cycle(2).opt).empty());
    EXPECT_FALSE(enumerate_reductions(cycle(4), cycle(2)).empty());
}

TEST(EnumerateReductions, ContainsThePlantedReduction) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto pair = planted(seed, 2, 2, 1 + static_cast<int>(seed % 2));
        const auto all = enumerate_reductions(solve(pair.mx), solve(pair.my));
        EXPECT_TRUE(std::binary_search(all.begin(), all.end(), pair.planted)) << "seed " << seed;
    }
}

TEST(EnumerateReductions, CapIsEnforced) {
    Rng rng(32);
    const auto x = solve(gen::random_mdp(rng, 6, 2));
    const auto y = solve(gen::random_mdp(rng, 3, 2));
    EXPECT_THROW(enumerate_reductions(x, y, 100.0), CapExceeded);
    EXPECT_NO_THROW(enumerate_reductions(x, y, 1e6));
}

TEST(EnumerateReductions, CapFromEnvironment) {
    ::setenv("MDPALIGN_CAP", "10", 1);
    EXPECT_EQ(enumeration_cap(), 10.0);
    ::unsetenv("MDPALIGN_CAP");
    EXPECT_EQ(enumeration_cap(), kDefaultEnumerationCap);
}

TEST(SearchConfig, RejectsInvalidValues) {
    SearchConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.restarts = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.decay = 1.5;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.lambda = -1.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.jobs = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(AlignmentObjective, ZeroOnReductionDerivedMaps) {
    const auto pair = planted(5, 3, 2);
    const auto x = solve(pair.mx);
    const auto y = solve(pair.my);
    const auto pi_y = covering_policy(y.opt);
    const AlignmentObjective objective(x, y, pi_y, 10.0);
    const auto loss = objective(alignment_from_reduction(pair.planted, x.mdp.action_count(), y.opt));
    EXPECT_TRUE(loss.met);
    EXPECT_FALSE(loss.degenerate);
    EXPECT_NEAR(loss.loss, 0.0, 1e-9);
}

TEST(AlignmentObjective, DegenerateCandidatesArePenalised) {
    Table<StateId> py(1, 2, 0);
    const auto y = solve(make_mdp(py, Table<double>(1, 2, 1.0), {1.0}));
    const auto x = solve(make_mdp(Table<StateId>(1, 1, 0), Table<double>(1, 1, 1.0), {1.0}));
    const auto pi_y = covering_policy(y.opt);
    const AlignmentObjective objective(x, y, pi_y, 10.0, 1.0);
    const auto loss = objective({{0}, {0, 0}});
    EXPECT_TRUE(loss.degenerate);
    EXPECT_FALSE(loss.met);
    EXPECT_NEAR(loss.loss, loss.gap + 10.0 * 1.0 + 1.0, 1e-12);
}

TEST(SearchAlignment, IdenticalMdpsAreRecovered) {
    int met = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed, 33);
        const auto m = gen::random_solved_unichain(rng, 2 + rng.below(4), 1 + rng.below(3));
        const auto y = solve(gen::permuted(m.mdp, rng));
        ASSERT_FALSE(enumerate_reductions(m, y).empty());
        SearchConfig cfg;
        cfg.rng_seed = seed;
        const auto res = search_alignment(m, y, covering_policy(y.opt), cfg);
        met += res.score.both_met() && res.loss <= 1e-7;
    }
    EXPECT_GE(met, 19);
}

TEST(SearchAlignment, PlantedSplitPairsAreMostlyRecovered) {
    int met = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pair = planted(seed, 3, 2);
        const auto x = solve(pair.mx);
        const auto y = solve(pair.my);
        SearchConfig cfg;
        cfg.rng_seed = seed;
        const auto res = search_alignment(x, y, covering_policy(y.opt), cfg);
        const bool both = evaluate_objectives(x, y, res.maps, covering_policy(y.opt)).both_met();
        EXPECT_EQ(both, res.score.both_met());
        met += both;
    }
    RecordProperty("recovered", met);
    EXPECT_GE(met, 16);
}

TEST(SearchAlignment, ZeroLambdaOnlyOptimisesReturn) {
    const auto pair = planted(3, 3, 2);
    const auto x = solve(pair.mx);
    const auto y = solve(pair.my);
    SearchConfig cfg;
    cfg.lambda = 0.0;
    cfg.max_iters = 200;
    const auto res = search_alignment(x, y, covering_policy(y.opt), cfg);
    EXPECT_TRUE(res.degenerate || res.score.objective1_met);
    EXPECT_NEAR(res.loss, res.degenerate ? res.score.suboptimality_gap + 1.0 : res.score.suboptimality_gap, 1e-9);
}

TEST(SearchAlignment, DeterministicAndIndependentOfJobs) {
    const auto pair = planted(8, 3, 2, 2);
    const auto x = solve(pair.mx);
    const auto y = solve(pair.my);
    const auto pi_y = covering_policy(y.opt);
    SearchConfig cfg;
    cfg.rng_seed = 17;
    cfg.max_iters = 300;
    cfg.stop_when_met = false;
    const auto a = search_alignment(x, y, pi_y, cfg);
    const auto b = search_alignment(x, y, pi_y, cfg);
    cfg.jobs = 3;
    const auto c = search_alignment(x, y, pi_y, cfg);
    EXPECT_EQ(a.maps, b.maps);
    EXPECT_EQ(a.maps, c.maps);
    EXPECT_EQ(a.restart, c.restart);
    ASSERT_EQ(a.trace.size(), c.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].loss, c.trace[i].loss);

    cfg.stop_when_met = true;
    cfg.jobs = 1;
    const auto serial = search_alignment(x, y, pi_y, cfg);
    cfg.jobs = 4;
    const auto parallel = search_alignment(x, y, pi_y, cfg);
    EXPECT_EQ(serial.maps, parallel.maps);
    EXPECT_EQ(serial.restart, parallel.restart);
}

TEST(SearchAlignment, TraceIsMonotone) {
    const auto pair = planted(2, 3, 2);
    const auto x = solve(pair.mx);
    const auto y = solve(pair.my);
    SearchConfig cfg;
    cfg.max_iters = 500;
    cfg.restarts = 3;
    cfg.stop_when_met = false;
    const auto res = search_alignment(x, y, covering_policy(y.opt), cfg);
    ASSERT_FALSE(res.trace.empty());
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
        EXPECT_LE(res.trace[i].loss, res.trace[i - 1].loss);
        EXPECT_GT(res.trace[i].iteration, res.trace[i - 1].iteration);
    }
}

TEST(GeneratePlanted, UnsplitPermutedPairIsAPermutation) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto pair = planted(seed, 4, 1);
        EXPECT_EQ(pair.mx.state_count(), pair.my.state_count());
        EXPECT_EQ(std::set<StateId>(pair.planted.phi.begin(), pair.planted.phi.end()).size(), pair.planted.phi.size());
        EXPECT_EQ(std::set<ActionId>(pair.planted.psi.begin(), pair.planted.psi.end()).size(), pair.planted.psi.size());
        EXPECT_TRUE(verify_reduction(solve(pair.mx), solve(pair.my), pair.planted).empty());
    }
}

TEST(GeneratePlanted, SplitPairVerifies) {
    const auto pair = planted(6, 3, 2);
    EXPECT_EQ(pair.mx.state_count(), 6);
    EXPECT_EQ(pair.my.state_count(), 3);
    EXPECT_TRUE(verify_reduction(solve(pair.mx), solve(pair.my), pair.planted).empty());
}

TEST(GeneratePlanted, SeedsReproduceInstances) {
    const auto a = planted(11, 3, 2, 2);
    const auto b = planted(11, 3, 2, 2);
    EXPECT_EQ(io::to_json(a.mx).dump(), io::to_json(b.mx).dump());
    EXPECT_EQ(io::to_json(a.my).dump(), io::to_json(b.my).dump());
    EXPECT_EQ(a.planted, b.planted);
    const auto c = planted(12, 3, 2, 2);
    EXPECT_NE(io::to_json(a.mx).dump(), io::to_json(c.mx).dump());
}

TEST(GeneratePlanted, RejectsInvalidSpecs) {
    PlantSpec spec;
    spec.base_states = 0;
    EXPECT_THROW(generate_planted(spec), InvalidInput);
    spec = {};
    spec.gamma = 1.0;
    EXPECT_THROW(generate_planted(spec), InvalidInput);
}

} // namespace
} // namespace mdpalign
