#include "generators.hpp"
#include "oracles.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/search.hpp"
#include "mdpalign/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace mdpalign {
namespace {

namespace gen = mdpalign::testing;
namespace oracle = mdpalign::testing::oracle;

TabularMdp two_cycle() {
    Table<StateId> p(2, 1);
    p(0, 0) = 1;
    p(1, 0) = 0;
    return make_mdp(p, Table<double>(2, 1, 0.0), {1.0, 0.0});
}

TEST(Rollout, DeterministicPolicyAndPointEta) {
    const auto m = two_cycle();
    const auto r = rollout(m, uniform_policy(2, 1), 5, 99);
    EXPECT_EQ(r.states, (std::vector<StateId>{0, 1, 0, 1, 0, 1}));
    EXPECT_EQ(r.actions, (std::vector<ActionId>{0, 0, 0, 0, 0}));
    EXPECT_EQ(r.length(), 5);
}

TEST(Rollout, SingleTransition) {
    const auto r = rollout(two_cycle(), uniform_policy(2, 1), 1, 0);
    EXPECT_EQ(r.states.size(), 2u);
    EXPECT_EQ(r.actions.size(), 1u);
}

TEST(Rollout, FollowsDynamicsAndIsReproducible) {
    Rng rng(51);
    const auto m = gen::random_mdp(rng, 5, 3);
    const auto pi = gen::random_policy(rng, 5, 3);
    const auto a = rollout(m, pi, 200, 7, 2);
    const auto b = rollout(m, pi, 200, 7, 2);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.actions, b.actions);
    for (int t = 0; t < a.length(); ++t) EXPECT_EQ(a.states[t + 1], m.next(a.states[t], a.actions[t]));
    const auto c = rollout(m, pi, 200, 7, 3);
    EXPECT_NE(a.actions, c.actions);
}

TEST(Rollout, ActionFrequenciesWithinBinomialBounds) {
    // One state, three actions: every step revisits state 0.
    const auto m = make_mdp(Table<StateId>(1, 3, 0), Table<double>(1, 3, 0.0), {1.0});
    TabularPolicy pi{Table<double>(1, 3)};
    pi.probs(0, 0) = 0.2;
    pi.probs(0, 1) = 0.3;
    pi.probs(0, 2) = 0.5;
    const int n = 10000;
    const auto r = rollout(m, pi, n, 2024);
    std::vector<int> counts(3, 0);
    for (ActionId a : r.actions) ++counts[a];
    for (int a = 0; a < 3; ++a) {
        const double p = pi.probs(0, a);
        const double sigma = std::sqrt(n * p * (1.0 - p));
        EXPECT_LE(std::abs(counts[a] - n * p), 3.0 * sigma) << "action " << a;
    }
}

TEST(EmpiricalTriplet, SelfLoopIsPointMass) {
    const auto m = make_mdp(Table<StateId>(1, 1, 0), Table<double>(1, 1, 0.0), {1.0});
    const std::uint64_t seeds[] = {1, 2, 3};
    for (int n : {1, 7, 100}) {
        const auto d = empirical_triplet(m, uniform_policy(1, 1), n, seeds);
        EXPECT_EQ(d.at({0, 0, 0}), 1.0);
        EXPECT_EQ(d.kind, DistributionKind::Empirical);
        EXPECT_EQ(d.sample_count, static_cast<std::uint64_t>(3 * n));
    }
}

TEST(EmpiricalTriplet, TwoCycleSplitsEvenlyAtEvenN) {
    const std::uint64_t seeds[] = {5};
    for (int n : {2, 10, 1000}) {
        const auto d = empirical_triplet(two_cycle(), uniform_policy(2, 1), n, seeds);
        EXPECT_EQ(d.at({0, 0, 1}), 0.5);
        EXPECT_EQ(d.at({1, 0, 0}), 0.5);
    }
}

TEST(EmpiricalTriplet, ConvergesToStationaryTriplet) {
    std::vector<double> tvs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed, 52);
        const auto [m, pi] = gen::random_unichain(rng, 6, 2);
        const std::uint64_t seeds[] = {seed};
        tvs.push_back(tv_distance(empirical_triplet(m, pi, 100000, seeds), stationary_triplet(m, pi)));
    }
    std::sort(tvs.begin(), tvs.end());
    EXPECT_LE(tvs[tvs.size() / 2], 0.05);
}

TEST(SequenceDistribution, DeterministicPolicyHasOneSequence) {
    const auto d = sequence_distribution(two_cycle(), uniform_policy(2, 1), 4);
    ASSERT_EQ(d.mass.size(), 1u);
    EXPECT_EQ(d.mass.begin()->first, (std::vector<StateId>{0, 1, 0, 1, 0}));
    EXPECT_EQ(d.mass.begin()->second, 1.0);
}

TEST(SequenceDistribution, HorizonZeroIsEta) {
    Rng rng(53);
    auto m = gen::random_mdp(rng, 4, 2);
    m.eta = {0.25, 0.0, 0.75, 0.0};
    const auto d = sequence_distribution(m, uniform_policy(4, 2), 0);
    ASSERT_EQ(d.mass.size(), 2u);
    EXPECT_EQ(d.mass.at({0}), 0.25);
    EXPECT_EQ(d.mass.at({2}), 0.75);
}

TEST(SequenceDistribution, MarginalsMatchMatrixPowers) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed, 54);
        const auto m = gen::random_mdp(rng, 4, 2);
        const auto pi = gen::random_policy(rng, 4, 2);
        const int n = 6;
        const auto d = sequence_distribution(m, pi, n);
        EXPECT_NEAR(d.total(), 1.0, 1e-12);
        for (int t = 0; t <= n; ++t) {
            const auto got = d.marginal(t, 4);
            const auto expected = oracle::marginal_by_matrix_power(m, pi, t);
            for (int s = 0; s < 4; ++s) EXPECT_NEAR(got[s], expected[s], 1e-12);
        }
    }
}

TEST(SequenceDistribution, LimitsAreEnforced) {
    Rng rng(55);
    const auto m = gen::random_mdp(rng, 4, 3);
    const auto pi = gen::random_policy(rng, 4, 3);
    EXPECT_THROW(sequence_distribution(m, pi, kMaxSequenceHorizon + 1), InvalidInput);
    EXPECT_THROW(sequence_distribution(m, pi, 8, 100), CapExceeded);
}

TEST(PushForward, SumsCollidingSequences) {
    SequenceDistribution d;
    d.horizon = 1;
    d.mass[{0, 1}] = 0.25;
    d.mass[{2, 1}] = 0.25;
    d.mass[{1, 1}] = 0.5;
    const std::vector<StateId> f{0, 1, 0};
    const auto out = push_forward(d, f);
    ASSERT_EQ(out.mass.size(), 2u);
    EXPECT_EQ(out.mass.at({0, 1}), 0.5);
    EXPECT_EQ(out.mass.at({1, 1}), 0.5);
}

TEST(ProcessEquivalence, IdentityOnIdenticalProcess) {
    Rng rng(56);
    const auto m = gen::random_mdp(rng, 4, 2);
    const auto pi = gen::random_policy(rng, 4, 2);
    const std::vector<StateId> f{0, 1, 2, 3};
    const auto res = check_process_equivalence(m, m, f, pi, pi, 5);
    EXPECT_TRUE(res.equivalent);
    EXPECT_EQ(res.max_discrepancy, 0.0);
}

TEST(ProcessEquivalence, PlantedPairsWithAdaptedCoveringPolicies) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PlantSpec spec;
        spec.base_states = 3;
        spec.split_factor_states = 2;
        spec.permute = true;
        spec.rng_seed = seed;
        const auto pair = generate_planted(spec);
        auto mx = pair.mx;
        // Start both processes from corresponding single states.
        std::fill(mx.eta.begin(), mx.eta.end(), 0.0);
        mx.eta[0] = 1.0;
        auto my = pair.my;
        std::fill(my.eta.begin(), my.eta.end(), 0.0);
        my.eta[pair.planted.phi[0]] = 1.0;
        const auto x = solve(pair.mx);
        const auto y = solve(pair.my);
        const auto pi_y = covering_policy(y.opt);
        const auto maps = alignment_from_reduction(pair.planted, mx.action_count(), y.opt);
        const auto pi_x = adapt_policy(pi_y, maps, mx.action_count());
        const auto res = check_process_equivalence(mx, my, maps.f, pi_x, pi_y, 3);
        EXPECT_TRUE(res.equivalent) << "seed " << seed << " discrepancy " << res.max_discrepancy;
    }
}

TEST(ProcessEquivalence, ConstantMapCollapsesTwoRecurrentStates) {
    const auto y = two_cycle();
    const std::vector<StateId> f{0, 0};
    const auto res = check_process_equivalence(y, y, f, uniform_policy(2, 1), uniform_policy(2, 1), 2);
    EXPECT_FALSE(res.equivalent);
    EXPECT_GT(res.max_discrepancy, 0.5);
}

TEST(ProcessEquivalence, NonSurjectiveMapsAreAllowed) {
    // x is a self-loop mapped onto one state of a y-chain that also contains an unvisited state.
    const auto mx = make_mdp(Table<StateId>(1, 1, 0), Table<double>(1, 1, 0.0), {1.0});
    Table<StateId> py(2, 1);
    py(0, 0) = 0;
    py(1, 0) = 0;
    const auto my = make_mdp(py, Table<double>(2, 1, 0.0), {1.0, 0.0});
    const std::vector<StateId> f{0};
    EXPECT_TRUE(check_process_equivalence(mx, my, f, uniform_policy(1, 1), uniform_policy(2, 1), 4).equivalent);
}

} // namespace
} // namespace mdpalign
