#pragma once

#include "mdpalign/chain.hpp"
#include "mdpalign/mdp.hpp"
#include "mdpalign/optimality.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace mdpalign {

/// Candidate MDP reduction (phi: S_x -> S_y, psi: A_x -> A_y).
struct ReductionMap {
    std::vector<StateId> phi;
    std::vector<ActionId> psi;

    friend auto operator<=>(const ReductionMap&, const ReductionMap&) = default;
};

/// Alignment (f: S_x -> S_y, g: A_y -> A_x) used to run a y-policy inside M_x.
struct AlignmentMaps {
    std::vector<StateId> f;
    std::vector<ActionId> g;

    bool g_injective() const;

    friend auto operator<=>(const AlignmentMaps&, const AlignmentMaps&) = default;
};

struct OptimalityViolation {
    StateId sx;
    ActionId ax;
    friend auto operator<=>(const OptimalityViolation&, const OptimalityViolation&) = default;
};

struct SurjectivityViolation {
    StateId sy;
    ActionId ay;
    friend auto operator<=>(const SurjectivityViolation&, const SurjectivityViolation&) = default;
};

struct DynamicsViolation {
    StateId sy;
    ActionId ay;
    StateId sx;
    ActionId ax;
    friend auto operator<=>(const DynamicsViolation&, const DynamicsViolation&) = default;
};

/// Everything a candidate (phi, psi) gets wrong. Empty iff it is a reduction.
struct ViolationReport {
    std::vector<OptimalityViolation> optimality;    // O_y(phi s, psi a) = 1 but O_x(s, a) = 0
    std::vector<SurjectivityViolation> surjectivity;  // O_y(s_y, a_y) = 1 with an empty preimage
    std::vector<DynamicsViolation> dynamics;        // P_y(s_y, a_y) != phi(P_x(s_x, a_x))

    bool empty() const { return optimality.empty() && surjectivity.empty() && dynamics.empty(); }
};

/// Exhaustive check of the three reduction conditions. The dynamics condition is
/// only checked on pairs with O_y(s_y, a_y) = 1.
ViolationReport verify_reduction(const TabularMdp& mx, const OptimalityModel& ox,
                                 const TabularMdp& my, const OptimalityModel& oy,
                                 const ReductionMap& r);

inline ViolationReport verify_reduction(const SolvedMdp& x, const SolvedMdp& y, const ReductionMap& r) {
    return verify_reduction(x.mdp, x.opt, y.mdp, y.opt, r);
}

/// pi_x(a_x | s_x) = sum over a_y with g(a_y) = a_x of pi_y(a_y | f(s_x)).
TabularPolicy adapt_policy(const TabularPolicy& pi_y, const AlignmentMaps& maps, int x_action_count);

/// Right inverse g of psi on optimal-relevant y-actions (those with O_y = 1 at
/// some state). Picks the smallest preimage, or a uniformly random one when a
/// seed is given. Actions outside the optimal-relevant set with no preimage map
/// to x-action 0. Throws EmptyPreimage when a relevant action has no preimage.
std::vector<ActionId> inverse_action_map(const std::vector<ActionId>& psi, int x_action_count,
                                         const OptimalityModel& oy,
                                         std::optional<std::uint64_t> rng_seed = std::nullopt);

/// Exact co-domain distribution: the pushforward of the stationary triplet
/// distribution of adapt_policy(pi_y) in M_x under (s, a, s') -> (f(s), g^-1(a), f(s')).
/// g^-1(a) is taken among y-actions pi_y supports at f(s); NonInjectiveG is
/// thrown when that is ambiguous on a supported triple.
TripletDistribution codomain_triplet(const TabularMdp& mx, const AlignmentMaps& maps,
                                     const TabularPolicy& pi_y);

struct ObjectiveScore {
    double optimal_return = 0.0;   // J*(M_x)
    double adapted_return = 0.0;   // J(pi_x)
    double suboptimality_gap = 0.0;
    double tv_distance = 0.0;
    bool objective1_met = false;
    bool objective2_met = false;

    bool both_met() const { return objective1_met && objective2_met; }
};

inline constexpr double kGapTolerance = 1e-7;
inline constexpr double kTvTolerance = 1e-9;

/// Objective 1: adapted policy optimal (gap <= 1e-7).
/// Objective 2: co-domain and target triplet distributions agree (TV <= 1e-9).
ObjectiveScore evaluate_objectives(const SolvedMdp& x, const SolvedMdp& y,
                                   const AlignmentMaps& maps, const TabularPolicy& pi_y);

/// Builds (phi, psi) from an objectives-meeting alignment with injective g:
/// phi = f on states the adapted policy visits in the long run, else the y dummy
/// state; psi = g^-1 on actions the adapted policy uses somewhere, else the y
/// dummy action. Requires both MDPs to carry dummies.
ReductionMap construct_reduction(const SolvedMdp& x, const SolvedMdp& y,
                                 const AlignmentMaps& maps, const TabularPolicy& pi_y);

/// f = phi and g = inverse_action_map(psi).
AlignmentMaps alignment_from_reduction(const ReductionMap& r, int x_action_count,
                                       const OptimalityModel& oy);

} // namespace mdpalign
