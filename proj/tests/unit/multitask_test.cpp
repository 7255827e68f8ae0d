#include "generators.hpp"
#include "oracles.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/multitask.hpp"
#include "mdpalign/search.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace mdpalign {
namespace {

namespace gen = mdpalign::testing;
namespace oracle = mdpalign::testing::oracle;

PlantedPair planted(std::uint64_t seed) {
    PlantSpec spec;
    spec.base_states = 2;
    spec.split_factor_states = 2;
    spec.permute = true;
    spec.rng_seed = seed;
    return generate_planted(spec);
}

TaskSet single_pair_set(const PlantedPair& p) { return make_task_set({p.mx}, {p.my}); }

TEST(TaskSet, SharedStructureIsEnforced) {
    const auto p = planted(1);
    auto other = p.mx;
    other.transition(0, 0) = (other.transition(0, 0) + 1) % other.state_count();
    EXPECT_THROW(make_task_set({p.mx, other}, {p.my, p.my}), InvalidInput);
    EXPECT_THROW(make_task_set({}, {}), InvalidInput);
    EXPECT_THROW(make_task_set({p.mx}, {p.my, p.my}), InvalidInput);
}

TEST(JointReductions, SinglePairEqualsEnumeration) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = planted(seed);
        const auto ts = single_pair_set(p);
        EXPECT_EQ(joint_reductions(ts), enumerate_reductions(ts.pairs[0].x, ts.pairs[0].y));
    }
}

TEST(JointReductions, SharedPlantedReductionSurvives) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = planted(seed);
        Rng rng(seed, 41);
        const auto ts = gen::planted_task_set(p, 3, rng);
        const auto joint = joint_reductions(ts);
        EXPECT_TRUE(std::binary_search(joint.begin(), joint.end(), p.planted)) << "seed " << seed;
        for (const auto& pair : ts.pairs) {
            const auto each = oracle::all_reductions(pair.x.mdp, pair.x.opt, pair.y.mdp, pair.y.opt);
            EXPECT_TRUE(std::includes(each.begin(), each.end(), joint.begin(), joint.end()));
        }
    }
}

TEST(JointReductions, ExtraTasksCanOnlyShrinkTheSet) {
    int strictly_smaller = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = planted(seed);
        Rng rng(seed, 42);
        const auto ts = gen::planted_task_set(p, 2, rng);
        const auto first = enumerate_reductions(ts.pairs[0].x, ts.pairs[0].y);
        const auto second = enumerate_reductions(ts.pairs[1].x, ts.pairs[1].y);
        std::vector<ReductionMap> expected;
        std::set_intersection(first.begin(), first.end(), second.begin(), second.end(), std::back_inserter(expected));
        const auto joint = joint_reductions(ts);
        EXPECT_EQ(joint, expected);
        strictly_smaller += joint.size() < first.size();
    }
    EXPECT_GT(strictly_smaller, 0);
}

TEST(IsTransferable, MemberPairIsTransferable) {
    const auto p = planted(3);
    Rng rng(43);
    const auto ts = gen::planted_task_set(p, 3, rng);
    for (const auto& pair : ts.pairs) {
        const auto res = is_transferable(ts, pair);
        EXPECT_TRUE(res.transferable);
        EXPECT_FALSE(res.witness.has_value());
        EXPECT_GT(res.joint_count, 0u);
    }
}

TEST(IsTransferable, PerturbedDynamicsBreakTransfer) {
    int dynamics_witnesses = 0, failures = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = planted(seed);
        Rng rng(seed, 44);
        const auto ts = gen::planted_task_set(p, 2, rng);
        const auto& base = ts.pairs[0];
        // Redirect one optimal y transition.
        TabularMdp y = base.y.mdp;
        for (int s = 0; s < y.state_count(); ++s)
            for (int a = 0; a < y.action_count(); ++a)
                if (base.y.opt.O(s, a) && y.state_count() > 1) {
                    y.transition(s, a) = (y.transition(s, a) + 1) % y.state_count();
                    s = y.state_count();
                    break;
                }
        const TaskPair target{base.x, solve(y)};
        const auto res = is_transferable(ts, target);
        if (res.transferable) continue;
        ++failures;
        ASSERT_TRUE(res.witness.has_value());
        EXPECT_FALSE(res.violations.empty());
        EXPECT_FALSE(verify_reduction(target.x, target.y, *res.witness).empty());
        dynamics_witnesses += !res.violations.dynamics.empty();
    }
    EXPECT_GT(failures, 0);
    EXPECT_GT(dynamics_witnesses, 0);
}

TEST(Cdnf, ValidationAndEvaluation) {
    CdnfExpr b{{{1, 2}, {3}}};
    EXPECT_NO_THROW(b.validate(3));
    EXPECT_THROW(b.validate(2), InvalidInput);
    EXPECT_THROW(CdnfExpr{{{}}}.validate(3), InvalidInput);
    EXPECT_THROW(CdnfExpr{{{0}}}.validate(3), InvalidInput);
    EXPECT_TRUE(b.evaluate({true, true, false}));
    EXPECT_TRUE(b.evaluate({false, false, true}));
    EXPECT_FALSE(b.evaluate({true, false, false}));
}

TEST(Cdnf, SingleMintermIsTheTaskItself) {
    const auto p = planted(5);
    Rng rng(45);
    const auto ts = gen::planted_task_set(p, 2, rng);
    const auto [ox, oy] = compose_cdnf(ts, CdnfExpr{{{2}}});
    EXPECT_EQ(ox.optimal, ts.pairs[1].x.opt.optimal);
    EXPECT_EQ(oy.optimal, ts.pairs[1].y.opt.optimal);
    EXPECT_TRUE(ox.externally_specified);
}

TEST(Cdnf, DisjunctionIsTheUnion) {
    const auto p = planted(6);
    Rng rng(46);
    const auto ts = gen::planted_task_set(p, 2, rng);
    const auto [ox, oy] = compose_cdnf(ts, CdnfExpr{{{1}, {2}}});
    for (int s = 0; s < oy.state_count(); ++s)
        for (int a = 0; a < oy.action_count(); ++a)
            EXPECT_EQ(oy.O(s, a), ts.pairs[0].y.opt.O(s, a) || ts.pairs[1].y.opt.O(s, a));
    const auto [cx, cy] = compose_cdnf(ts, CdnfExpr{{{1, 2}}});
    for (int s = 0; s < cx.state_count(); ++s)
        for (int a = 0; a < cx.action_count(); ++a)
            EXPECT_EQ(cx.O(s, a), ts.pairs[0].x.opt.O(s, a) && ts.pairs[1].x.opt.O(s, a));
}

TEST(Cdnf, ComposedTargetsAreTransferable) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto p = planted(seed);
        Rng rng(seed, 47);
        const int tasks = 2 + rng.below(2);
        const auto ts = gen::planted_task_set(p, tasks, rng);
        const auto b = gen::random_cdnf(rng, tasks);
        EXPECT_TRUE(is_transferable(ts, cdnf_target(ts, b)).transferable) << "seed " << seed;
    }
}

// Two states whose optimal actions differ, so no merge preserves optimality.
SolvedMdp alternating() {
    Table<StateId> p(2, 2);
    p(0, 0) = 1;
    p(0, 1) = 0;
    p(1, 0) = 1;
    p(1, 1) = 0;
    Table<double> r(2, 2, 0.0);
    r(0, 0) = 1.0;
    r(1, 1) = 1.0;
    return solve(make_mdp(p, r, {0.5, 0.5}));
}

TEST(MaximalReduction, IrreducibleMdpIsItsOwnQuotient) {
    const auto m = alternating();
    ASSERT_TRUE(m.opt.O(0, 0) && !m.opt.O(0, 1) && m.opt.O(1, 1) && !m.opt.O(1, 0));
    const auto q = maximal_reduction(m);
    EXPECT_EQ(q.quotient.mdp.state_count(), 2);
    EXPECT_EQ(q.quotient.mdp.action_count(), 2);
    EXPECT_TRUE(isomorphic(q.quotient, m));
}

TEST(MaximalReduction, DuplicatedStateIsMergedBack) {
    const auto base = alternating();
    const auto grown = solve(gen::duplicate_state(base.mdp, 0, 0));
    ASSERT_EQ(grown.mdp.state_count(), 3);
    const auto q = maximal_reduction(grown);
    EXPECT_EQ(q.quotient.mdp.state_count(), 2);
    EXPECT_EQ(q.r.phi[1], q.r.phi[2]);
    EXPECT_TRUE(isomorphic(q.quotient, base));
    EXPECT_TRUE(verify_reduction(grown, q.quotient, q.r).empty());
}

TEST(MaximalReduction, UniformOptimalityCollapsesACycle) {
    // Every state has the same optimal row, so one state suffices.
    Table<StateId> p(3, 1);
    for (int s = 0; s < 3; ++s) p(s, 0) = (s + 1) % 3;
    const auto m = solve(make_mdp(p, Table<double>(3, 1, 1.0), {1.0 / 3, 1.0 / 3, 1.0 / 3}));
    const auto q = maximal_reduction(m);
    EXPECT_EQ(q.quotient.mdp.state_count(), 1);
    EXPECT_TRUE(verify_reduction(m, q.quotient, q.r).empty());
}

TEST(MaximalReduction, OrderIndependentIdempotentAndVerified) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(seed, 48);
        const auto m = solve(gen::random_mdp(rng, 3 + rng.below(3), 2 + rng.below(2)));
        const auto first = maximal_reduction(m);
        EXPECT_TRUE(verify_reduction(m, first.quotient, first.r).empty());
        for (std::uint64_t order = 1; order < 5; ++order) {
            const auto q = maximal_reduction(m, order);
            EXPECT_EQ(q.quotient.mdp.state_count(), first.quotient.mdp.state_count());
            EXPECT_TRUE(isomorphic(q.quotient, first.quotient)) << "seed " << seed << " order " << order;
        }
        const auto again = maximal_reduction(first.quotient);
        EXPECT_EQ(again.quotient.mdp.state_count(), first.quotient.mdp.state_count());
        EXPECT_TRUE(isomorphic(again.quotient, first.quotient));
    }
}

TEST(QuotientMdp, SmallestMemberRepresentsEachClass) {
    Rng rng(49);
    const auto m = gen::random_mdp(rng, 4, 2);
    const auto q = quotient_mdp(m, {0, 1, 0, 1}, {0, 0});
    EXPECT_EQ(q.state_count(), 2);
    EXPECT_EQ(q.action_count(), 1);
    EXPECT_EQ(q.reward(1, 0), m.reward(1, 0));
    EXPECT_NEAR(q.eta[0], m.eta[0] + m.eta[2], 1e-15);
    const auto explicit_rep = quotient_mdp(m, {0, 1, 0, 1}, {0, 0}, {2, 3}, {1});
    EXPECT_EQ(explicit_rep.reward(0, 0), m.reward(2, 1));
}

TEST(Isomorphism, PermutedCopiesAreIsomorphic) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed, 50);
        const auto a = solve(gen::random_mdp(rng, 2 + rng.below(4), 1 + rng.below(3)));
        const auto b = solve(gen::permuted(a.mdp, rng));
        const auto iso = find_isomorphism(a.mdp, a.opt, b.mdp, b.opt);
        ASSERT_TRUE(iso.has_value());
        EXPECT_TRUE(verify_reduction(a, b, *iso).empty());
        EXPECT_TRUE(oracle::is_reduction(a.mdp, a.opt, b.mdp, b.opt, *iso));
    }
}

TEST(Isomorphism, DifferentOptimalStructureIsNot) {
    Table<StateId> p3(3, 1), p2(3, 1);
    for (int s = 0; s < 3; ++s) p3(s, 0) = (s + 1) % 3;
    p2(0, 0) = 1;
    p2(1, 0) = 0;
    p2(2, 0) = 0;
    const auto a = solve(make_mdp(p3, Table<double>(3, 1, 1.0), {1.0 / 3, 1.0 / 3, 1.0 / 3}));
    const auto b = solve(make_mdp(p2, Table<double>(3, 1, 1.0), {1.0 / 3, 1.0 / 3, 1.0 / 3}));
    EXPECT_FALSE(isomorphic(a, b));
    EXPECT_FALSE(isomorphic(a, solve(make_mdp(Table<StateId>(1, 1, 0), Table<double>(1, 1, 1.0), {1.0}))));
}

} // namespace
} // namespace mdpalign
