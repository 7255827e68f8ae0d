#pragma once

#include "mdpalign/mdp.hpp"
#include "mdpalign/optimality.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

namespace mdpalign {

struct Triplet {
    StateId state = 0;
    ActionId action = 0;
    StateId next = 0;

    friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

enum class DistributionKind { Exact, Empirical };

/// Probability mass over (s, a, s') transitions.
struct TripletDistribution {
    std::map<Triplet, double> mass;
    DistributionKind kind = DistributionKind::Exact;
    std::uint64_t sample_count = 0;  // Empirical only

    double total() const;
    double at(const Triplet& t) const;
    /// Marginal over the first state of each triplet.
    std::map<StateId, double> state_marginal() const;
};

/// Total variation distance 1/2 sum |p - q|.
double tv_distance(const TripletDistribution& p, const TripletDistribution& q);

struct ChainReport {
    std::vector<StateId> reachable;                     // from supp(eta), sorted
    std::vector<std::vector<StateId>> recurrent_classes;  // closed SCCs within reachable
    std::vector<int> periods;                           // one per recurrent class
    bool unichain() const { return recurrent_classes.size() == 1; }
    bool aperiodic() const;
};

/// Reachability, recurrent classes and their periods for the chain induced by pi.
ChainReport validate_chain(const TabularMdp& mdp, const TabularPolicy& pi);

/// Stationary state distribution on the unique reachable recurrent class,
/// zero on transient states. Throws MultichainError otherwise.
std::vector<double> stationary_states(const TabularMdp& mdp, const TabularPolicy& pi);

/// mass(s,a,s') = mu(s) * pi(a|s) * 1[s' = P(s,a)].
TripletDistribution stationary_triplet(const TabularMdp& mdp, const TabularPolicy& pi);

/// Checks the regularity conditions the adaptation theorems rely on, restricted
/// to the non-dummy part of the MDP:
///  - every greedy action at a state leads to the same successor,
///  - those successors form one cycle through every non-dummy state,
///  - eta has full support on non-dummy states and no mass on the dummy state,
///  - the dummy pairs (if any) are never optimal.
/// Under these conditions every deterministic optimal policy induces an
/// irreducible chain on the non-dummy states.
bool satisfies_regularity(const TabularMdp& mdp, const OptimalityModel& opt);

} // namespace mdpalign
