#pragma once

#include "mdpalign/alignment.hpp"
#include "mdpalign/mdp.hpp"
#include "mdpalign/optimality.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mdpalign {

/// Default enumeration cap on |S_y|^|S_x| * |A_y|^|A_x| candidates. The
/// MDPALIGN_CAP environment variable overrides it.
inline constexpr double kDefaultEnumerationCap = 1e8;
double enumeration_cap();

/// All (phi, psi) with an empty ViolationReport, in lexicographic order.
/// Throws CapExceeded when the candidate space is larger than `cap`.
std::vector<ReductionMap> enumerate_reductions(const TabularMdp& mx, const OptimalityModel& ox,
                                               const TabularMdp& my, const OptimalityModel& oy,
                                               std::optional<double> cap = std::nullopt);

inline std::vector<ReductionMap> enumerate_reductions(const SolvedMdp& x, const SolvedMdp& y,
                                                      std::optional<double> cap = std::nullopt) {
    return enumerate_reductions(x.mdp, x.opt, y.mdp, y.opt, cap);
}

struct SearchConfig {
    double lambda = 10.0;
    long max_iters = 20000;
    int restarts = 8;
    double initial_temperature = 1.0;
    double decay = 0.995;
    std::uint64_t rng_seed = 0;
    /// Additive loss penalty for candidates whose chain is multichain or whose
    /// g is ambiguous on supported actions (their TV is taken as 1).
    double degenerate_penalty = 1.0;
    /// Stop as soon as a candidate meets both objectives.
    bool stop_when_met = true;
    /// Restarts evaluated concurrently; results do not depend on this.
    int jobs = 1;

    void validate() const;
};

struct TracePoint {
    long iteration = 0;  // global across restarts
    double loss = 0.0;   // best so far
    double gap = 0.0;
    double tv = 0.0;
};

struct SearchResult {
    AlignmentMaps maps;
    ObjectiveScore score;
    double loss = 0.0;
    bool degenerate = false;
    int restart = 0;  // restart that produced the best candidate
    std::vector<TracePoint> trace;
};

/// Loss of one candidate: gap + lambda * TV, with TV = 1 plus the degenerate
/// penalty when the co-domain distribution is undefined.
struct CandidateLoss {
    double loss = 0.0;
    double gap = 0.0;
    double tv = 0.0;
    bool degenerate = false;
    bool met = false;
};

/// Caches J*(M_x) and the target distribution for repeated evaluation.
class AlignmentObjective {
public:
    AlignmentObjective(const SolvedMdp& x, const SolvedMdp& y, const TabularPolicy& pi_y,
                       double lambda, double degenerate_penalty = 1.0);

    CandidateLoss operator()(const AlignmentMaps& maps) const;

private:
    const SolvedMdp& x_;
    const TabularPolicy& pi_y_;
    double lambda_;
    double penalty_;
    double optimal_return_;
    TripletDistribution target_;
};

/// Simulated annealing over (f, g) tables for min gap + lambda * TV.
SearchResult search_alignment(const SolvedMdp& x, const SolvedMdp& y, const TabularPolicy& pi_y,
                              const SearchConfig& cfg = {});

struct PlantSpec {
    int base_states = 3;
    int base_actions = 2;
    int split_factor_states = 1;
    int split_factor_actions = 1;
    bool permute = false;
    std::uint64_t rng_seed = 0;
    double gamma = 0.95;
    CriterionMode mode = CriterionMode::Stationary;

    void validate() const;
};

struct PlantedPair {
    TabularMdp mx;
    TabularMdp my;
    ReductionMap planted;
};

/// Random M_y with a unichain covering chain, and M_x obtained by splitting each
/// y-state and y-action into copies so that the merge maps form a reduction.
/// The pair also satisfies: the lexicographic inverse of psi with the covering
/// policy of M_y induces a unichain on M_x.
PlantedPair generate_planted(const PlantSpec& spec);

} // namespace mdpalign
