#pragma once

#include "mdpalign/mdp.hpp"

#include <string_view>
#include <vector>

namespace mdpalign {

/// Which long-run notion defines the optimality function O.
///  - Stationary: (s,a) optimal iff s is recurrent under the covering policy
///    (reachable from supp(eta)) and a is greedy at s.
///  - Occupancy: (s,a) optimal iff s is reachable from supp(eta) through greedy
///    transitions and a is greedy at s (support of the discounted occupancy).
enum class CriterionMode { Stationary, Occupancy };

std::string_view to_string(CriterionMode mode);
CriterionMode parse_mode(std::string_view text);

struct OptimalityModel {
    Table<double> q_star;
    std::vector<double> v_star;
    std::vector<std::vector<ActionId>> greedy_sets;
    std::vector<StateId> recurrent_states;  // sorted
    Table<char> optimal;                    // O(s,a) in {0,1}
    CriterionMode mode = CriterionMode::Stationary;
    /// Set when `optimal` was supplied directly rather than solved from rewards;
    /// only `optimal` and `mode` are meaningful then.
    bool externally_specified = false;

    bool O(StateId s, ActionId a) const { return optimal(s, a) != 0; }
    int state_count() const noexcept { return static_cast<int>(optimal.rows()); }
    int action_count() const noexcept { return static_cast<int>(optimal.cols()); }
};

/// An MDP together with its solved optimality model.
struct SolvedMdp {
    TabularMdp mdp;
    OptimalityModel opt;
};

struct SolveOptions {
    double residual = 1e-12;
    long max_sweeps = 1'000'000;
    /// Greedy ties: q >= v - tie_scale * max(1, |v|).
    double tie_scale = 1e-8;
};

OptimalityModel solve_optimal(const TabularMdp& mdp,
                              CriterionMode mode = CriterionMode::Stationary,
                              const SolveOptions& options = {});

SolvedMdp solve(TabularMdp mdp, CriterionMode mode = CriterionMode::Stationary);

/// O table supplied directly (an "O-specified" task).
OptimalityModel external_optimality(Table<char> optimal, CriterionMode mode);

/// Uniform mixture over the greedy set of every state.
TabularPolicy covering_policy(const OptimalityModel& opt);

/// Discounted return eta^T (I - gamma P_pi)^{-1} r_pi by a direct solve.
double policy_value(const TabularMdp& mdp, const TabularPolicy& pi);

/// Per-state values (I - gamma P_pi)^{-1} r_pi.
std::vector<double> policy_state_values(const TabularMdp& mdp, const TabularPolicy& pi);

/// Optimal discounted return eta^T v*.
double optimal_value(const TabularMdp& mdp, const OptimalityModel& opt);

/// Sup-norm residual of the Bellman optimality operator at q.
double bellman_residual(const TabularMdp& mdp, const Table<double>& q);

} // namespace mdpalign
