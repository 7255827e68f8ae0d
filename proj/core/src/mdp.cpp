#include "mdpalign/mdp.hpp"

#include "mdpalign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mdpalign {

namespace {

constexpr double kSumTolerance = 1e-12;

std::string at_state(int s) { return " at state " + std::to_string(s); }

} // namespace

void TabularMdp::validate() const {
    const int n = state_count();
    const int m = action_count();
    if (n <= 0) throw InvalidInput("MDP must have at least one state", "states");
    if (m <= 0) throw InvalidInput("MDP must have at least one action", "actions");
    if (static_cast<int>(state_labels.size()) != n)
        throw InvalidInput("state label count does not match transition rows", "states");
    if (static_cast<int>(action_labels.size()) != m)
        throw InvalidInput("action label count does not match transition columns", "actions");
    if (reward.rows() != transition.rows() || reward.cols() != transition.cols())
        throw InvalidInput("reward table shape differs from transition table", "reward");
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < m; ++a) {
            const StateId t = transition(s, a);
            if (t < 0 || t >= n)
                throw InvalidInput("transition target out of range" + at_state(s), "transition");
            if (!std::isfinite(reward(s, a)))
                throw InvalidInput("non-finite reward" + at_state(s), "reward");
        }
    }
    if (static_cast<int>(eta.size()) != n)
        throw InvalidInput("eta length does not match state count", "eta");
    double sum = 0.0;
    for (double p : eta) {
        if (!(p >= 0.0)) throw InvalidInput("eta has a negative entry", "eta");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw InvalidInput("eta must sum to 1 (got " + std::to_string(sum) + ")", "eta");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidInput("gamma must lie in (0, 1)", "gamma");
    if (dummy_state && (*dummy_state < 0 || *dummy_state >= n))
        throw InvalidInput("dummy state out of range", "dummy_state");
    if (dummy_action && (*dummy_action < 0 || *dummy_action >= m))
        throw InvalidInput("dummy action out of range", "dummy_action");
    if (dummy_state && eta[*dummy_state] != 0.0)
        throw InvalidInput("dummy state must carry no initial mass", "eta");
}

TabularMdp make_mdp(Table<StateId> transition, Table<double> reward,
                    std::vector<double> eta, double gamma) {
    TabularMdp mdp;
    for (std::size_t s = 0; s < transition.rows(); ++s)
        mdp.state_labels.push_back("s" + std::to_string(s));
    for (std::size_t a = 0; a < transition.cols(); ++a)
        mdp.action_labels.push_back("a" + std::to_string(a));
    mdp.transition = std::move(transition);
    mdp.reward = std::move(reward);
    mdp.eta = std::move(eta);
    mdp.gamma = gamma;
    mdp.validate();
    return mdp;
}

void TabularPolicy::validate() const {
    for (int s = 0; s < state_count(); ++s) {
        double sum = 0.0;
        for (double p : probs.row(s)) {
            if (!(p >= 0.0)) throw InvalidInput("policy has a negative probability" + at_state(s), "probs");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw InvalidInput("policy row does not sum to 1" + at_state(s), "probs");
    }
}

TabularPolicy uniform_policy(int states, int actions) {
    return TabularPolicy{Table<double>(states, actions, 1.0 / actions)};
}

TabularPolicy deterministic_policy(std::span<const ActionId> choice, int actions) {
    TabularPolicy pi{Table<double>(choice.size(), actions, 0.0)};
    for (std::size_t s = 0; s < choice.size(); ++s) pi.probs(s, choice[s]) = 1.0;
    return pi;
}

TabularMdp augment_with_dummies(const TabularMdp& mdp) {
    if (mdp.dummy_state || mdp.dummy_action)
        throw InvalidInput("MDP already carries dummy state/action", "dummy_state");
    const int n = mdp.state_count();
    const int m = mdp.action_count();
    const double floor_reward =
        *std::min_element(mdp.reward.data().begin(), mdp.reward.data().end()) - 1.0;

    TabularMdp out;
    out.state_labels = mdp.state_labels;
    out.state_labels.push_back("s_dummy");
    out.action_labels = mdp.action_labels;
    out.action_labels.push_back("a_dummy");
    out.transition = Table<StateId>(n + 1, m + 1);
    out.reward = Table<double>(n + 1, m + 1);
    for (int s = 0; s <= n; ++s) {
        for (int a = 0; a <= m; ++a) {
            const bool dummy_pair = s == n || a == m;
            out.transition(s, a) = dummy_pair ? n : mdp.transition(s, a);
            out.reward(s, a) = dummy_pair ? floor_reward : mdp.reward(s, a);
        }
    }
    out.eta = mdp.eta;
    out.eta.push_back(0.0);
    out.gamma = mdp.gamma;
    out.dummy_state = n;
    out.dummy_action = m;
    return out;
}

std::vector<std::vector<int>> preimages(std::span<const int> map, int codomain_size) {
    std::vector<std::vector<int>> out(codomain_size);
    for (std::size_t x = 0; x < map.size(); ++x) {
        if (map[x] < 0 || map[x] >= codomain_size)
            throw InvalidInput("map entry " + std::to_string(x) + " out of range");
        out[map[x]].push_back(static_cast<int>(x));
    }
    return out;
}

} // namespace mdpalign
