#pragma once

#include "mdpalign/chain.hpp"
#include "mdpalign/mdp.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace mdpalign {

/// N transitions: states has N + 1 entries, actions has N.
struct Rollout {
    std::vector<StateId> states;
    std::vector<ActionId> actions;

    int length() const noexcept { return static_cast<int>(actions.size()); }
};

/// s0 ~ eta, a_t ~ pi(.|s_t), s_{t+1} = P(s_t, a_t). Deterministic in (seed, stream).
Rollout rollout(const TabularMdp& mdp, const TabularPolicy& pi, int n, std::uint64_t seed,
                std::uint64_t stream = 0);

/// Time-averaged triplet counts over N transitions per seed, pooled across seeds.
TripletDistribution empirical_triplet(const TabularMdp& mdp, const TabularPolicy& pi, int n,
                                      std::span<const std::uint64_t> seeds);

inline constexpr int kMaxSequenceHorizon = 12;
inline constexpr std::size_t kDefaultSequenceCap = 1'000'000;

/// Exact law of (s_0, ..., s_N).
struct SequenceDistribution {
    int horizon = 0;
    std::map<std::vector<StateId>, double> mass;

    double total() const;
    /// Distribution of s_t.
    std::vector<double> marginal(int t, int state_count) const;
};

SequenceDistribution sequence_distribution(const TabularMdp& mdp, const TabularPolicy& pi, int n,
                                           std::size_t cap = kDefaultSequenceCap);

/// Image of a sequence distribution under an elementwise state map.
SequenceDistribution push_forward(const SequenceDistribution& d, std::span<const StateId> f);

struct EquivalenceResult {
    bool equivalent = false;
    double max_discrepancy = 0.0;
};

inline constexpr double kProcessTolerance = 1e-9;

/// Compares the law of (f(s_0), ..., f(s_N)) under pi_x in M_x with the law of
/// (s_0, ..., s_N) under pi_y in M_y.
EquivalenceResult check_process_equivalence(const TabularMdp& mx, const TabularMdp& my,
                                            std::span<const StateId> f, const TabularPolicy& pi_x,
                                            const TabularPolicy& pi_y, int n,
                                            std::size_t cap = kDefaultSequenceCap);

} // namespace mdpalign
