#include "mdpalign/search.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/rng.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace mdpalign {

void SearchConfig::validate() const {
    if (!(lambda >= 0.0)) throw InvalidInput("lambda must be nonnegative", "lambda");
    if (max_iters < 0) throw InvalidInput("max_iters must be nonnegative", "max_iters");
    if (restarts < 1) throw InvalidInput("restarts must be at least 1", "restarts");
    if (!(initial_temperature > 0.0))
        throw InvalidInput("initial_temperature must be positive", "initial_temperature");
    if (!(decay > 0.0 && decay < 1.0)) throw InvalidInput("decay must lie in (0, 1)", "decay");
    if (!(degenerate_penalty >= 0.0))
        throw InvalidInput("degenerate_penalty must be nonnegative", "degenerate_penalty");
    if (jobs < 1) throw InvalidInput("jobs must be at least 1", "jobs");
}

AlignmentObjective::AlignmentObjective(const SolvedMdp& x, const SolvedMdp& y, const TabularPolicy& pi_y,
                                       double lambda, double degenerate_penalty)
    : x_(x), pi_y_(pi_y), lambda_(lambda), penalty_(degenerate_penalty),
      optimal_return_(optimal_value(x.mdp, x.opt)), target_(stationary_triplet(y.mdp, pi_y)) {
    if (x.opt.mode != y.opt.mode) throw ModeMismatch("optimality models were solved under different criteria");
}

CandidateLoss AlignmentObjective::operator()(const AlignmentMaps& maps) const {
    CandidateLoss out;
    const auto pi_x = adapt_policy(pi_y_, maps, x_.mdp.action_count());
    out.gap = optimal_return_ - policy_value(x_.mdp, pi_x);
    try {
        out.tv = tv_distance(codomain_triplet(x_.mdp, maps, pi_y_), target_);
    } catch (const MultichainError&) {
        out.degenerate = true;
    } catch (const NonInjectiveG&) {
        out.degenerate = true;
    }
    if (out.degenerate) out.tv = 1.0;
    out.loss = out.gap + lambda_ * out.tv + (out.degenerate ? penalty_ : 0.0);
    out.met = !out.degenerate && out.gap <= kGapTolerance && out.tv <= kTvTolerance;
    return out;
}

namespace {

struct RestartOutcome {
    AlignmentMaps maps;
    CandidateLoss best;
    std::vector<TracePoint> trace;  // restart-local best so far
};

RestartOutcome anneal(const AlignmentObjective& objective, int nx, int ny, int nax, int nay,
                      const SearchConfig& cfg, int restart) {
    Rng rng(cfg.rng_seed, static_cast<std::uint64_t>(restart) + 1);
    AlignmentMaps cur{std::vector<StateId>(nx), std::vector<ActionId>(nay)};
    for (auto& v : cur.f) v = rng.below(ny);
    for (auto& v : cur.g) v = rng.below(nax);
    CandidateLoss cur_loss = objective(cur);

    RestartOutcome out{cur, cur_loss, {}};
    const int f_moves = ny > 1 ? nx : 0;
    const int g_moves = nax > 1 ? nay : 0;
    double temperature = cfg.initial_temperature;
    for (long it = 0; it < cfg.max_iters; ++it) {
        if (cfg.stop_when_met && out.best.met) break;
        if (f_moves + g_moves == 0) break;

        AlignmentMaps cand = cur;
        const int k = rng.below(f_moves + g_moves);
        if (k < f_moves) {
            // Uniform over the other ny - 1 values.
            const int v = rng.below(ny - 1);
            cand.f[k] = v >= cur.f[k] ? v + 1 : v;
        } else {
            const int j = k - f_moves;
            const int v = rng.below(nax - 1);
            cand.g[j] = v >= cur.g[j] ? v + 1 : v;
        }
        const CandidateLoss cand_loss = objective(cand);
        const double delta = cand_loss.loss - cur_loss.loss;
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
            cur = std::move(cand);
            cur_loss = cand_loss;
            if (cur_loss.loss < out.best.loss || (cur_loss.met && !out.best.met)) {
                out.best = cur_loss;
                out.maps = cur;
            }
        }
        temperature *= cfg.decay;
        out.trace.push_back({it, out.best.loss, out.best.gap, out.best.tv});
    }
    return out;
}

bool better(const CandidateLoss& a, const CandidateLoss& b) {
    if (a.met != b.met) return a.met;
    return a.loss < b.loss;
}

} // namespace

SearchResult search_alignment(const SolvedMdp& x, const SolvedMdp& y, const TabularPolicy& pi_y,
                              const SearchConfig& cfg) {
    cfg.validate();
    pi_y.validate();
    if (pi_y.state_count() != y.mdp.state_count() || pi_y.action_count() != y.mdp.action_count())
        throw InvalidInput("policy shape does not match M_y", "policy");
    const AlignmentObjective objective(x, y, pi_y, cfg.lambda, cfg.degenerate_penalty);
    const int nx = x.mdp.state_count();
    const int ny = y.mdp.state_count();
    const int nax = x.mdp.action_count();
    const int nay = y.mdp.action_count();

    std::vector<RestartOutcome> outcomes;
    bool met = false;
    for (int first = 0; first < cfg.restarts && !met; first += cfg.jobs) {
        const int last = std::min(cfg.restarts, first + cfg.jobs);
        if (last - first == 1) {
            outcomes.push_back(anneal(objective, nx, ny, nax, nay, cfg, first));
        } else {
            std::vector<std::future<RestartOutcome>> batch;
            for (int r = first; r < last; ++r)
                batch.push_back(std::async(std::launch::async, anneal, std::cref(objective), nx, ny, nax,
                                           nay, std::cref(cfg), r));
            for (auto& fut : batch) outcomes.push_back(fut.get());
        }
        for (int r = first; r < last && !met; ++r) {
            met = cfg.stop_when_met && outcomes[r].best.met;
            // Drop restarts a serial run would not have reached.
            if (met) outcomes.resize(r + 1);
        }
    }

    SearchResult result;
    int chosen = 0;
    for (int r = 1; r < static_cast<int>(outcomes.size()); ++r)
        if (better(outcomes[r].best, outcomes[chosen].best)) chosen = r;
    result.maps = outcomes[chosen].maps;
    result.loss = outcomes[chosen].best.loss;
    result.degenerate = outcomes[chosen].best.degenerate;
    result.restart = chosen;

    // Trace: best so far across restarts, in restart order.
    long offset = 0;
    double best = std::numeric_limits<double>::infinity();
    TracePoint best_point;
    for (const auto& o : outcomes) {
        for (const auto& p : o.trace) {
            if (p.loss < best) {
                best = p.loss;
                best_point = p;
            }
            result.trace.push_back({offset + p.iteration, best_point.loss, best_point.gap, best_point.tv});
        }
        offset += static_cast<long>(o.trace.size());
    }

    if (result.degenerate) {
        const auto& b = outcomes[chosen].best;
        result.score.optimal_return = optimal_value(x.mdp, x.opt);
        result.score.suboptimality_gap = b.gap;
        result.score.adapted_return = result.score.optimal_return - b.gap;
        result.score.tv_distance = 1.0;
        result.score.objective1_met = b.gap <= kGapTolerance;
    } else {
        result.score = evaluate_objectives(x, y, result.maps, pi_y);
    }
    return result;
}

} // namespace mdpalign
