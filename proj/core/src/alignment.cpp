#include "mdpalign/alignment.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/rng.hpp"

#include <algorithm>
#include <string>

namespace mdpalign {

bool AlignmentMaps::g_injective() const {
    auto sorted = g;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

namespace {

void check_map(const std::vector<int>& map, int domain, int codomain, const char* name) {
    if (static_cast<int>(map.size()) != domain)
        throw InvalidInput(std::string(name) + " has " + std::to_string(map.size()) +
                               " entries, expected " + std::to_string(domain),
                           name);
    for (int v : map)
        if (v < 0 || v >= codomain)
            throw InvalidInput(std::string(name) + " entry out of range", name);
}

void check_same_mode(const OptimalityModel& a, const OptimalityModel& b) {
    if (a.mode != b.mode)
        throw ModeMismatch("optimality models were solved under different criteria");
}

} // namespace

ViolationReport verify_reduction(const TabularMdp& mx, const OptimalityModel& ox,
                                 const TabularMdp& my, const OptimalityModel& oy,
                                 const ReductionMap& r) {
    check_same_mode(ox, oy);
    check_map(r.phi, mx.state_count(), my.state_count(), "phi");
    check_map(r.psi, mx.action_count(), my.action_count(), "psi");

    ViolationReport report;
    for (StateId sx = 0; sx < mx.state_count(); ++sx)
        for (ActionId ax = 0; ax < mx.action_count(); ++ax)
            if (oy.O(r.phi[sx], r.psi[ax]) && !ox.O(sx, ax)) report.optimality.push_back({sx, ax});

    const auto phi_inv = preimages(r.phi, my.state_count());
    const auto psi_inv = preimages(r.psi, my.action_count());
    for (StateId sy = 0; sy < my.state_count(); ++sy) {
        for (ActionId ay = 0; ay < my.action_count(); ++ay) {
            if (!oy.O(sy, ay)) continue;
            if (phi_inv[sy].empty() || psi_inv[ay].empty()) report.surjectivity.push_back({sy, ay});
            for (StateId sx : phi_inv[sy])
                for (ActionId ax : psi_inv[ay])
                    if (my.next(sy, ay) != r.phi[mx.next(sx, ax)])
                        report.dynamics.push_back({sy, ay, sx, ax});
        }
    }
    return report;
}

TabularPolicy adapt_policy(const TabularPolicy& pi_y, const AlignmentMaps& maps, int x_action_count) {
    check_map(maps.f, static_cast<int>(maps.f.size()), pi_y.state_count(), "f");
    check_map(maps.g, pi_y.action_count(), x_action_count, "g");
    const int nx = static_cast<int>(maps.f.size());
    TabularPolicy pi_x{Table<double>(nx, x_action_count, 0.0)};
    for (StateId sx = 0; sx < nx; ++sx)
        for (ActionId ay = 0; ay < pi_y.action_count(); ++ay)
            pi_x.probs(sx, maps.g[ay]) += pi_y.probs(maps.f[sx], ay);
    return pi_x;
}

std::vector<ActionId> inverse_action_map(const std::vector<ActionId>& psi, int x_action_count,
                                         const OptimalityModel& oy, std::optional<std::uint64_t> rng_seed) {
    const int ay_count = oy.action_count();
    check_map(psi, x_action_count, ay_count, "psi");
    const auto inv = preimages(psi, ay_count);
    std::optional<Rng> rng;
    if (rng_seed) rng.emplace(*rng_seed);

    std::vector<ActionId> g(ay_count, 0);
    for (ActionId ay = 0; ay < ay_count; ++ay) {
        bool relevant = false;
        for (StateId sy = 0; sy < oy.state_count() && !relevant; ++sy) relevant = oy.O(sy, ay);
        if (inv[ay].empty()) {
            if (relevant)
                throw EmptyPreimage("optimal-relevant y-action " + std::to_string(ay) +
                                    " has no preimage under psi");
            continue;
        }
        g[ay] = rng ? inv[ay][rng->below(static_cast<int>(inv[ay].size()))] : inv[ay].front();
    }
    return g;
}

TripletDistribution codomain_triplet(const TabularMdp& mx, const AlignmentMaps& maps,
                                     const TabularPolicy& pi_y) {
    check_map(maps.f, mx.state_count(), pi_y.state_count(), "f");
    const auto pi_x = adapt_policy(pi_y, maps, mx.action_count());
    const auto rho = stationary_triplet(mx, pi_x);

    TripletDistribution out;
    out.kind = DistributionKind::Exact;
    for (const auto& [t, p] : rho.mass) {
        const StateId sy = maps.f[t.state];
        ActionId preimage = -1;
        for (ActionId ay = 0; ay < pi_y.action_count(); ++ay) {
            if (maps.g[ay] != t.action || pi_y.probs(sy, ay) <= 0.0) continue;
            if (preimage >= 0)
                throw NonInjectiveG("x-action " + std::to_string(t.action) +
                                    " has several supported preimages under g at y-state " +
                                    std::to_string(sy));
            preimage = ay;
        }
        out.mass[{sy, preimage, maps.f[t.next]}] += p;
    }
    return out;
}

ObjectiveScore evaluate_objectives(const SolvedMdp& x, const SolvedMdp& y,
                                   const AlignmentMaps& maps, const TabularPolicy& pi_y) {
    check_same_mode(x.opt, y.opt);
    check_map(maps.f, x.mdp.state_count(), y.mdp.state_count(), "f");
    check_map(maps.g, y.mdp.action_count(), x.mdp.action_count(), "g");

    ObjectiveScore score;
    const auto pi_x = adapt_policy(pi_y, maps, x.mdp.action_count());
    score.optimal_return = optimal_value(x.mdp, x.opt);
    score.adapted_return = policy_value(x.mdp, pi_x);
    score.suboptimality_gap = score.optimal_return - score.adapted_return;
    score.objective1_met = score.suboptimality_gap <= kGapTolerance;

    const auto target = stationary_triplet(y.mdp, pi_y);
    const auto proxy = codomain_triplet(x.mdp, maps, pi_y);
    score.tv_distance = tv_distance(proxy, target);
    score.objective2_met = score.tv_distance <= kTvTolerance;
    return score;
}

ReductionMap construct_reduction(const SolvedMdp& x, const SolvedMdp& y,
                                 const AlignmentMaps& maps, const TabularPolicy& pi_y) {
    if (!x.mdp.dummy_state || !x.mdp.dummy_action || !y.mdp.dummy_state || !y.mdp.dummy_action)
        throw PreconditionFailed("construct_reduction requires dummy-augmented MDPs");
    if (!maps.g_injective()) throw NonInjectiveG("construct_reduction requires an injective g");
    const auto score = evaluate_objectives(x, y, maps, pi_y);
    if (!score.both_met())
        throw PreconditionFailed("alignment does not meet both objectives (gap " +
                                 std::to_string(score.suboptimality_gap) + ", tv " +
                                 std::to_string(score.tv_distance) + ")");

    const auto pi_x = adapt_policy(pi_y, maps, x.mdp.action_count());
    const auto mu = stationary_states(x.mdp, pi_x);

    std::vector<ActionId> g_inverse(x.mdp.action_count(), -1);
    for (ActionId ay = 0; ay < y.mdp.action_count(); ++ay) g_inverse[maps.g[ay]] = ay;

    ReductionMap r;
    r.phi.resize(x.mdp.state_count());
    for (StateId sx = 0; sx < x.mdp.state_count(); ++sx)
        r.phi[sx] = mu[sx] > 0.0 ? maps.f[sx] : *y.mdp.dummy_state;

    r.psi.assign(x.mdp.action_count(), *y.mdp.dummy_action);
    for (ActionId ax = 0; ax < x.mdp.action_count(); ++ax) {
        bool used = false;
        for (StateId sx = 0; sx < x.mdp.state_count() && !used; ++sx) used = pi_x.probs(sx, ax) > 0.0;
        if (used) r.psi[ax] = g_inverse[ax];
    }
    return r;
}

AlignmentMaps alignment_from_reduction(const ReductionMap& r, int x_action_count,
                                       const OptimalityModel& oy) {
    return {r.phi, inverse_action_map(r.psi, x_action_count, oy)};
}

} // namespace mdpalign
