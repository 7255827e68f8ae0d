#include "mdpalign/optimality.hpp"

#include "graph.hpp"
#include "mdpalign/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mdpalign {

std::string_view to_string(CriterionMode mode) {
    return mode == CriterionMode::Stationary ? "stationary" : "occupancy";
}

CriterionMode parse_mode(std::string_view text) {
    if (text == "stationary") return CriterionMode::Stationary;
    if (text == "occupancy") return CriterionMode::Occupancy;
    throw InvalidInput("unknown criterion mode '" + std::string(text) + "'", "mode");
}

namespace {

std::vector<double> max_over_actions(const Table<double>& q) {
    std::vector<double> v(q.rows(), -std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < q.rows(); ++s)
        for (double x : q.row(s)) v[s] = std::max(v[s], x);
    return v;
}

void bellman_update(const TabularMdp& mdp, const std::vector<double>& v, Table<double>& q) {
    for (int s = 0; s < mdp.state_count(); ++s)
        for (int a = 0; a < mdp.action_count(); ++a)
            q(s, a) = mdp.reward(s, a) + mdp.gamma * v[mdp.next(s, a)];
}

std::vector<int> eta_support(const TabularMdp& mdp) {
    std::vector<int> out;
    for (int s = 0; s < mdp.state_count(); ++s)
        if (mdp.eta[s] > 0.0) out.push_back(s);
    return out;
}

} // namespace

double bellman_residual(const TabularMdp& mdp, const Table<double>& q) {
    const auto v = max_over_actions(q);
    double worst = 0.0;
    for (int s = 0; s < mdp.state_count(); ++s)
        for (int a = 0; a < mdp.action_count(); ++a)
            worst = std::max(worst, std::abs(mdp.reward(s, a) + mdp.gamma * v[mdp.next(s, a)] - q(s, a)));
    return worst;
}

OptimalityModel solve_optimal(const TabularMdp& mdp, CriterionMode mode, const SolveOptions& options) {
    const int n = mdp.state_count();
    const int m = mdp.action_count();

    OptimalityModel out;
    out.mode = mode;
    out.q_star = Table<double>(n, m, 0.0);
    std::vector<double> v(n, 0.0);

    long sweep = 0;
    for (;; ++sweep) {
        if (sweep >= options.max_sweeps)
            throw NumericError("value iteration did not converge within " +
                               std::to_string(options.max_sweeps) + " sweeps");
        bellman_update(mdp, v, out.q_star);
        auto next_v = max_over_actions(out.q_star);
        double delta = 0.0;
        for (int s = 0; s < n; ++s) delta = std::max(delta, std::abs(next_v[s] - v[s]));
        v = std::move(next_v);
        // The Q residual after this update is gamma * delta.
        if (mdp.gamma * delta <= options.residual) break;
    }
    bellman_update(mdp, v, out.q_star);

    // Polish: evaluate an argmax policy exactly. Kept when it is a Bellman fixed
    // point to working precision, which removes the O(gamma * delta / (1 - gamma))
    // truncation error of the iteration.
    {
        std::vector<ActionId> choice(n, 0);
        for (int s = 0; s < n; ++s) {
            const auto row = out.q_star.row(s);
            choice[s] = static_cast<ActionId>(std::max_element(row.begin(), row.end()) - row.begin());
        }
        Table<double> polished(n, m);
        bellman_update(mdp, policy_state_values(mdp, deterministic_policy(choice, m)), polished);
        if (bellman_residual(mdp, polished) < bellman_residual(mdp, out.q_star)) out.q_star = std::move(polished);
    }
    out.v_star = max_over_actions(out.q_star);

    out.greedy_sets.resize(n);
    for (int s = 0; s < n; ++s) {
        const double tol = options.tie_scale * std::max(1.0, std::abs(out.v_star[s]));
        for (int a = 0; a < m; ++a)
            if (out.q_star(s, a) >= out.v_star[s] - tol) out.greedy_sets[s].push_back(a);
    }

    // Greedy transition graph: edges s -> P(s,a) for greedy a (the covering chain).
    detail::Adjacency adj(n);
    for (int s = 0; s < n; ++s) {
        for (ActionId a : out.greedy_sets[s]) adj[s].push_back(mdp.next(s, a));
        std::sort(adj[s].begin(), adj[s].end());
        adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
    }
    const auto reach = detail::reachable_from(adj, eta_support(mdp));
    for (const auto& cls : detail::closed_components(adj, reach))
        out.recurrent_states.insert(out.recurrent_states.end(), cls.begin(), cls.end());
    std::sort(out.recurrent_states.begin(), out.recurrent_states.end());

    out.optimal = Table<char>(n, m, 0);
    std::vector<char> marked(n, 0);
    if (mode == CriterionMode::Stationary) {
        for (StateId s : out.recurrent_states) marked[s] = 1;
    } else {
        marked = reach;
    }
    for (int s = 0; s < n; ++s)
        if (marked[s])
            for (ActionId a : out.greedy_sets[s]) out.optimal(s, a) = 1;
    return out;
}

SolvedMdp solve(TabularMdp mdp, CriterionMode mode) {
    auto opt = solve_optimal(mdp, mode);
    return {std::move(mdp), std::move(opt)};
}

OptimalityModel external_optimality(Table<char> optimal, CriterionMode mode) {
    OptimalityModel out;
    out.optimal = std::move(optimal);
    out.mode = mode;
    out.externally_specified = true;
    return out;
}

TabularPolicy covering_policy(const OptimalityModel& opt) {
    if (opt.externally_specified)
        throw InvalidInput("covering policy needs solved greedy sets");
    const int n = static_cast<int>(opt.greedy_sets.size());
    TabularPolicy pi{Table<double>(n, opt.action_count(), 0.0)};
    for (int s = 0; s < n; ++s) {
        const auto& g = opt.greedy_sets[s];
        for (ActionId a : g) pi.probs(s, a) = 1.0 / static_cast<double>(g.size());
    }
    return pi;
}

std::vector<double> policy_state_values(const TabularMdp& mdp, const TabularPolicy& pi) {
    const int n = mdp.state_count();
    const int m = mdp.action_count();
    if (pi.state_count() != n || pi.action_count() != m)
        throw InvalidInput("policy shape does not match MDP");
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < m; ++a) {
            const double p = pi.probs(s, a);
            if (p == 0.0) continue;
            system(s, mdp.next(s, a)) -= mdp.gamma * p;
            r(s) += p * mdp.reward(s, a);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    Eigen::VectorXd values = lu.solve(r);
    const double residual = (system * values - r).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, r.lpNorm<Eigen::Infinity>());
    if (!values.allFinite() || residual > 1e-10 * scale)
        throw NumericError("policy evaluation system is singular or ill-conditioned");
    return {values.data(), values.data() + n};
}

double policy_value(const TabularMdp& mdp, const TabularPolicy& pi) {
    const auto values = policy_state_values(mdp, pi);
    double j = 0.0;
    for (int s = 0; s < mdp.state_count(); ++s) j += mdp.eta[s] * values[s];
    return j;
}

double optimal_value(const TabularMdp& mdp, const OptimalityModel& opt) {
    double j = 0.0;
    for (int s = 0; s < mdp.state_count(); ++s) j += mdp.eta[s] * opt.v_star[s];
    return j;
}

} // namespace mdpalign
