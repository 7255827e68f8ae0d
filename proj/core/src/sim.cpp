#include "mdpalign/sim.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdpalign {

namespace {

void check_policy(const TabularMdp& mdp, const TabularPolicy& pi) {
    if (pi.state_count() != mdp.state_count() || pi.action_count() != mdp.action_count())
        throw InvalidInput("policy shape does not match MDP", "policy");
}

} // namespace

Rollout rollout(const TabularMdp& mdp, const TabularPolicy& pi, int n, std::uint64_t seed,
                std::uint64_t stream) {
    if (n < 1) throw InvalidInput("rollout length must be at least 1", "N");
    check_policy(mdp, pi);
    Rng rng(seed, stream);
    Rollout out;
    out.states.reserve(n + 1);
    out.actions.reserve(n);
    StateId s = rng.categorical(mdp.eta);
    out.states.push_back(s);
    for (int t = 0; t < n; ++t) {
        const ActionId a = rng.categorical(pi.probs.row(s));
        s = mdp.next(s, a);
        out.actions.push_back(a);
        out.states.push_back(s);
    }
    return out;
}

TripletDistribution empirical_triplet(const TabularMdp& mdp, const TabularPolicy& pi, int n,
                                      std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw InvalidInput("at least one seed is required", "seeds");
    std::map<Triplet, std::uint64_t> counts;
    for (std::uint64_t seed : seeds) {
        const auto r = rollout(mdp, pi, n, seed);
        for (int t = 0; t < n; ++t) ++counts[{r.states[t], r.actions[t], r.states[t + 1]}];
    }
    TripletDistribution out;
    out.kind = DistributionKind::Empirical;
    out.sample_count = static_cast<std::uint64_t>(n) * seeds.size();
    for (const auto& [t, c] : counts)
        out.mass[t] = static_cast<double>(c) / static_cast<double>(out.sample_count);
    return out;
}

double SequenceDistribution::total() const {
    double sum = 0.0;
    for (const auto& [seq, p] : mass) sum += p;
    return sum;
}

std::vector<double> SequenceDistribution::marginal(int t, int state_count) const {
    std::vector<double> out(state_count, 0.0);
    for (const auto& [seq, p] : mass) out[seq[t]] += p;
    return out;
}

SequenceDistribution sequence_distribution(const TabularMdp& mdp, const TabularPolicy& pi, int n,
                                           std::size_t cap) {
    if (n < 0 || n > kMaxSequenceHorizon)
        throw InvalidInput("sequence horizon must lie in 0.." + std::to_string(kMaxSequenceHorizon), "N");
    check_policy(mdp, pi);
    SequenceDistribution out;
    out.horizon = n;
    for (StateId s = 0; s < mdp.state_count(); ++s)
        if (mdp.eta[s] > 0.0) out.mass[{s}] += mdp.eta[s];

    for (int t = 0; t < n; ++t) {
        std::map<std::vector<StateId>, double> next;
        for (const auto& [seq, p] : out.mass) {
            const StateId s = seq.back();
            for (ActionId a = 0; a < mdp.action_count(); ++a) {
                const double q = pi.probs(s, a);
                if (q <= 0.0) continue;
                auto longer = seq;
                longer.push_back(mdp.next(s, a));
                next[std::move(longer)] += p * q;
            }
            if (next.size() > cap)
                throw CapExceeded("sequence distribution exceeds " + std::to_string(cap) + " sequences");
        }
        out.mass = std::move(next);
    }
    return out;
}

SequenceDistribution push_forward(const SequenceDistribution& d, std::span<const StateId> f) {
    SequenceDistribution out;
    out.horizon = d.horizon;
    for (const auto& [seq, p] : d.mass) {
        std::vector<StateId> image(seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) image[i] = f[seq[i]];
        out.mass[std::move(image)] += p;
    }
    return out;
}

EquivalenceResult check_process_equivalence(const TabularMdp& mx, const TabularMdp& my,
                                            std::span<const StateId> f, const TabularPolicy& pi_x,
                                            const TabularPolicy& pi_y, int n, std::size_t cap) {
    if (static_cast<int>(f.size()) != mx.state_count())
        throw InvalidInput("f must have one entry per x-state", "f");
    for (StateId v : f)
        if (v < 0 || v >= my.state_count()) throw InvalidInput("f entry out of range", "f");

    const auto image = push_forward(sequence_distribution(mx, pi_x, n, cap), f);
    const auto target = sequence_distribution(my, pi_y, n, cap);

    EquivalenceResult out;
    auto a = image.mass.begin();
    auto b = target.mass.begin();
    while (a != image.mass.end() || b != target.mass.end()) {
        double diff;
        if (b == target.mass.end() || (a != image.mass.end() && a->first < b->first)) {
            diff = a->second;
            ++a;
        } else if (a == image.mass.end() || b->first < a->first) {
            diff = b->second;
            ++b;
        } else {
            diff = std::abs(a->second - b->second);
            ++a;
            ++b;
        }
        out.max_discrepancy = std::max(out.max_discrepancy, diff);
    }
    out.equivalent = out.max_discrepancy <= kProcessTolerance;
    return out;
}

} // namespace mdpalign
