#include "mdpalign/chain.hpp"

#include "graph.hpp"
#include "mdpalign/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace mdpalign {

double TripletDistribution::total() const {
    double sum = 0.0;
    for (const auto& [t, p] : mass) sum += p;
    return sum;
}

double TripletDistribution::at(const Triplet& t) const {
    auto it = mass.find(t);
    return it == mass.end() ? 0.0 : it->second;
}

std::map<StateId, double> TripletDistribution::state_marginal() const {
    std::map<StateId, double> out;
    for (const auto& [t, p] : mass) out[t.state] += p;
    return out;
}

double tv_distance(const TripletDistribution& p, const TripletDistribution& q) {
    double sum = 0.0;
    auto a = p.mass.begin();
    auto b = q.mass.begin();
    while (a != p.mass.end() || b != q.mass.end()) {
        if (b == q.mass.end() || (a != p.mass.end() && a->first < b->first)) {
            sum += std::abs(a->second);
            ++a;
        } else if (a == p.mass.end() || b->first < a->first) {
            sum += std::abs(b->second);
            ++b;
        } else {
            sum += std::abs(a->second - b->second);
            ++a;
            ++b;
        }
    }
    return 0.5 * sum;
}

bool ChainReport::aperiodic() const {
    return std::all_of(periods.begin(), periods.end(), [](int p) { return p == 1; });
}

namespace {

detail::Adjacency induced_graph(const TabularMdp& mdp, const TabularPolicy& pi) {
    if (pi.state_count() != mdp.state_count() || pi.action_count() != mdp.action_count())
        throw InvalidInput("policy shape does not match MDP");
    detail::Adjacency adj(mdp.state_count());
    for (int s = 0; s < mdp.state_count(); ++s) {
        for (int a = 0; a < mdp.action_count(); ++a)
            if (pi.probs(s, a) > 0.0) adj[s].push_back(mdp.next(s, a));
        std::sort(adj[s].begin(), adj[s].end());
        adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
    }
    return adj;
}

std::vector<int> support_of(const std::vector<double>& eta) {
    std::vector<int> out;
    for (std::size_t s = 0; s < eta.size(); ++s)
        if (eta[s] > 0.0) out.push_back(static_cast<int>(s));
    return out;
}

} // namespace

ChainReport validate_chain(const TabularMdp& mdp, const TabularPolicy& pi) {
    const auto adj = induced_graph(mdp, pi);
    const auto reach = detail::reachable_from(adj, support_of(mdp.eta));
    ChainReport report;
    for (int s = 0; s < mdp.state_count(); ++s)
        if (reach[s]) report.reachable.push_back(s);
    report.recurrent_classes = detail::closed_components(adj, reach);
    for (const auto& cls : report.recurrent_classes)
        report.periods.push_back(detail::period_of(adj, cls));
    return report;
}

std::vector<double> stationary_states(const TabularMdp& mdp, const TabularPolicy& pi) {
    const auto report = validate_chain(mdp, pi);
    if (report.recurrent_classes.size() != 1)
        throw MultichainError(std::to_string(report.recurrent_classes.size()) +
                              " recurrent classes reachable from the initial distribution");
    const auto& cls = report.recurrent_classes.front();
    const int k = static_cast<int>(cls.size());
    std::vector<int> local(mdp.state_count(), -1);
    for (int i = 0; i < k; ++i) local[cls[i]] = i;

    // Rows of P_C^T - I, with the last equation replaced by sum(mu) = 1.
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        const StateId s = cls[i];
        system(i, i) -= 1.0;
        for (int a = 0; a < mdp.action_count(); ++a) {
            const double p = pi.probs(s, a);
            if (p > 0.0) system(local[mdp.next(s, a)], i) += p;
        }
    }
    system.row(k - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    rhs(k - 1) = 1.0;
    Eigen::VectorXd mu = system.fullPivLu().solve(rhs);
    if (!mu.allFinite() || (system * mu - rhs).lpNorm<Eigen::Infinity>() > 1e-10)
        throw NumericError("stationary system could not be solved");

    std::vector<double> out(mdp.state_count(), 0.0);
    for (int i = 0; i < k; ++i) out[cls[i]] = std::max(0.0, mu(i));
    return out;
}

TripletDistribution stationary_triplet(const TabularMdp& mdp, const TabularPolicy& pi) {
    const auto mu = stationary_states(mdp, pi);
    TripletDistribution out;
    out.kind = DistributionKind::Exact;
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (mu[s] <= 0.0) continue;
        for (int a = 0; a < mdp.action_count(); ++a) {
            const double p = pi.probs(s, a);
            if (p > 0.0) out.mass[{s, a, mdp.next(s, a)}] += mu[s] * p;
        }
    }
    return out;
}

bool satisfies_regularity(const TabularMdp& mdp, const OptimalityModel& opt) {
    if (opt.externally_specified) return false;
    const int n = mdp.state_count();
    const int base = n - (mdp.dummy_state ? 1 : 0);
    auto is_dummy_state = [&](StateId s) { return mdp.dummy_state && *mdp.dummy_state == s; };
    auto is_dummy_action = [&](ActionId a) { return mdp.dummy_action && *mdp.dummy_action == a; };

    std::vector<StateId> successor(n, -1);
    for (StateId s = 0; s < n; ++s) {
        if (is_dummy_state(s)) {
            for (ActionId a = 0; a < mdp.action_count(); ++a)
                if (opt.O(s, a)) return false;
            if (mdp.eta[s] != 0.0) return false;
            continue;
        }
        if (!(mdp.eta[s] > 0.0)) return false;
        for (ActionId a : opt.greedy_sets[s]) {
            if (is_dummy_action(a)) return false;
            const StateId t = mdp.next(s, a);
            if (is_dummy_state(t)) return false;
            if (successor[s] >= 0 && successor[s] != t) return false;
            successor[s] = t;
        }
    }
    // Successor map must be a single cycle through all non-dummy states.
    StateId start = 0;
    while (is_dummy_state(start)) ++start;
    StateId cur = start;
    for (int step = 1; step <= base; ++step) {
        cur = successor[cur];
        if (cur == start) return step == base;
    }
    return false;
}

} // namespace mdpalign
