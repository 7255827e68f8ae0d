#pragma once

#include "mdpalign/alignment.hpp"
#include "mdpalign/mdp.hpp"
#include "mdpalign/optimality.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mdpalign {

/// One alignment task: an (M_x, M_y) pair with solved optimality models.
struct TaskPair {
    SolvedMdp x;
    SolvedMdp y;
};

/// Alignment task set. All x-MDPs share states, actions, dynamics, eta and
/// gamma and differ only in reward; likewise for the y-MDPs.
struct TaskSet {
    std::vector<TaskPair> pairs;

    /// Throws InvalidInput when the task set is empty or the shared structure differs.
    void validate() const;
};

/// Builds a task set by solving every pair under `mode`.
TaskSet make_task_set(const std::vector<TabularMdp>& x_mdps, const std::vector<TabularMdp>& y_mdps,
                      CriterionMode mode = CriterionMode::Stationary);

/// Intersection of the per-pair reduction sets, lexicographically sorted.
std::vector<ReductionMap> joint_reductions(const TaskSet& ts, std::optional<double> cap = std::nullopt);

struct TransferResult {
    bool transferable = true;
    std::size_t joint_count = 0;
    std::optional<ReductionMap> witness;  // first joint reduction failing on the target
    ViolationReport violations;           // its report
};

/// True iff every joint reduction of `ts` is a reduction of the target pair.
TransferResult is_transferable(const TaskSet& ts, const TaskPair& target,
                               std::optional<double> cap = std::nullopt);

/// Positive DNF over tasks: each minterm is a set of 1-based task indices.
struct CdnfExpr {
    std::vector<std::vector<int>> minterms;

    void validate(int task_count) const;
    bool evaluate(const std::vector<bool>& literals) const;
};

/// Pointwise evaluation of `b` over the per-task O tables, for both domains.
/// The returned models are externally specified and carry only O.
std::pair<OptimalityModel, OptimalityModel> compose_cdnf(const TaskSet& ts, const CdnfExpr& b);

/// Target pair with the shared dynamics of `ts` and composed O tables.
TaskPair cdnf_target(const TaskSet& ts, const CdnfExpr& b);

struct MaximalReduction {
    SolvedMdp quotient;
    ReductionMap r;  // m -> quotient
};

/// Coarsest self-reduction by greedy merging to a fixed point. Candidate state
/// and action merges are tried in an order shuffled by `order_seed` (sorted when
/// absent); a merge is kept iff, for some choice of class representatives, the
/// re-solved quotient verifies as a reduction and its optimality function is
/// the image of m's.
MaximalReduction maximal_reduction(const SolvedMdp& m, std::optional<std::uint64_t> order_seed = std::nullopt);

/// Quotient of `m` by the given state and action partitions (class ids must be
/// 0..k-1). Each class is represented by its smallest member.
TabularMdp quotient_mdp(const TabularMdp& m, const std::vector<int>& state_class,
                        const std::vector<int>& action_class);

/// Quotient with explicit representatives: state_rep[c] / action_rep[d] supply
/// the rewards and transitions of class c / d.
TabularMdp quotient_mdp(const TabularMdp& m, const std::vector<int>& state_class,
                        const std::vector<int>& action_class, const std::vector<int>& state_rep,
                        const std::vector<int>& action_rep);

/// Isomorphism in the sense of MDP permutations: bijections of states and
/// actions that are reductions in both directions, i.e. that preserve O exactly
/// and the transitions of every optimal pair. Returns the bijections (a -> b)
/// when one exists.
std::optional<ReductionMap> find_isomorphism(const TabularMdp& ma, const OptimalityModel& oa,
                                             const TabularMdp& mb, const OptimalityModel& ob);

inline bool isomorphic(const SolvedMdp& a, const SolvedMdp& b) {
    return find_isomorphism(a.mdp, a.opt, b.mdp, b.opt).has_value();
}

} // namespace mdpalign
