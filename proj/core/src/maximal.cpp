#include "mdpalign/multitask.hpp"

#include "mdpalign/rng.hpp"

#include <algorithm>
#include <numeric>

namespace mdpalign {

namespace {

constexpr long kRepresentativeCap = 4096;

class Partition {
public:
    explicit Partition(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) const {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

    /// Class ids 0..k-1 numbered by smallest member.
    std::vector<int> labels() const {
        const int n = static_cast<int>(parent_.size());
        std::vector<int> root_label(n, -1), out(n);
        int next = 0;
        for (int x = 0; x < n; ++x) {
            const int r = find(x);
            if (root_label[r] < 0) root_label[r] = next++;
            out[x] = root_label[r];
        }
        return out;
    }

private:
    std::vector<int> parent_;
};

struct Candidate {
    bool is_state;
    int i, j;
};

class Merger {
public:
    explicit Merger(const SolvedMdp& m) : m_(m) {}

    // Merges forced by dynamics preservation once (s1, s2) and (a1, a2) share classes.
    void close(Partition& states, Partition& actions) const {
        const int n = m_.mdp.state_count();
        const int k = m_.mdp.action_count();
        for (bool changed = true; changed;) {
            changed = false;
            for (int s1 = 0; s1 < n; ++s1)
                for (int s2 = s1; s2 < n; ++s2) {
                    if (states.find(s1) != states.find(s2)) continue;
                    for (int a1 = 0; a1 < k; ++a1) {
                        if (!m_.opt.O(s1, a1)) continue;
                        for (int a2 = 0; a2 < k; ++a2) {
                            if (!m_.opt.O(s2, a2) || actions.find(a1) != actions.find(a2)) continue;
                            changed |= states.unite(m_.mdp.next(s1, a1), m_.mdp.next(s2, a2));
                        }
                    }
                }
        }
    }

    // Tries representative choices in mixed-radix order, smallest members first,
    // and keeps the first whose re-solved quotient verifies and preserves the
    // greedy structure: O(s, a) = O_q(phi(s), psi(a)) for every pair.
    std::optional<MaximalReduction> attempt(const Partition& states, const Partition& actions) const {
        MaximalReduction out;
        out.r.phi = states.labels();
        out.r.psi = actions.labels();
        auto members = [](const std::vector<int>& label) {
            std::vector<std::vector<int>> cls(*std::max_element(label.begin(), label.end()) + 1);
            for (int x = 0; x < static_cast<int>(label.size()); ++x) cls[label[x]].push_back(x);
            return cls;
        };
        const auto scls = members(out.r.phi);
        const auto acls = members(out.r.psi);
        std::vector<const std::vector<int>*> digits;
        for (const auto& c : scls) digits.push_back(&c);
        for (const auto& c : acls) digits.push_back(&c);
        std::vector<std::size_t> pick(digits.size(), 0);

        for (long tried = 0; tried < kRepresentativeCap; ++tried) {
            std::vector<int> srep, arep;
            for (std::size_t i = 0; i < scls.size(); ++i) srep.push_back(scls[i][pick[i]]);
            for (std::size_t i = 0; i < acls.size(); ++i) arep.push_back(acls[i][pick[scls.size() + i]]);
            out.quotient = solve(quotient_mdp(m_.mdp, out.r.phi, out.r.psi, srep, arep), m_.opt.mode);
            if (preserves_greedy(out) && verify_reduction(m_, out.quotient, out.r).empty()) return out;

            std::size_t i = 0;
            for (; i < digits.size(); ++i) {
                if (++pick[i] < digits[i]->size()) break;
                pick[i] = 0;
            }
            if (i == digits.size()) break;
        }
        return std::nullopt;
    }

private:
    bool preserves_greedy(const MaximalReduction& q) const {
        for (int s = 0; s < m_.mdp.state_count(); ++s)
            for (int a = 0; a < m_.mdp.action_count(); ++a)
                if (m_.opt.O(s, a) != q.quotient.opt.O(q.r.phi[s], q.r.psi[a])) return false;
        return true;
    }

    const SolvedMdp& m_;
};

} // namespace

TabularMdp quotient_mdp(const TabularMdp& m, const std::vector<int>& state_class,
                        const std::vector<int>& action_class) {
    const int ns = *std::max_element(state_class.begin(), state_class.end()) + 1;
    const int na = *std::max_element(action_class.begin(), action_class.end()) + 1;
    std::vector<int> srep(ns, -1), arep(na, -1);
    for (int s = m.state_count() - 1; s >= 0; --s) srep[state_class[s]] = s;
    for (int a = m.action_count() - 1; a >= 0; --a) arep[action_class[a]] = a;
    return quotient_mdp(m, state_class, action_class, srep, arep);
}

TabularMdp quotient_mdp(const TabularMdp& m, const std::vector<int>& state_class,
                        const std::vector<int>& action_class, const std::vector<int>& state_rep,
                        const std::vector<int>& action_rep) {
    const int ns = static_cast<int>(state_rep.size());
    const int na = static_cast<int>(action_rep.size());
    const auto& srep = state_rep;
    const auto& arep = action_rep;
    std::vector<int> ssize(ns, 0), asize(na, 0);
    for (int c : state_class) ++ssize[c];
    for (int d : action_class) ++asize[d];

    TabularMdp q;
    q.transition = Table<StateId>(ns, na);
    q.reward = Table<double>(ns, na);
    q.eta.assign(ns, 0.0);
    q.gamma = m.gamma;
    for (int s = 0; s < m.state_count(); ++s) q.eta[state_class[s]] += m.eta[s];
    for (int c = 0; c < ns; ++c) {
        q.state_labels.push_back(m.state_labels[srep[c]]);
        for (int d = 0; d < na; ++d) {
            q.transition(c, d) = state_class[m.next(srep[c], arep[d])];
            q.reward(c, d) = m.reward(srep[c], arep[d]);
        }
    }
    for (int d = 0; d < na; ++d) q.action_labels.push_back(m.action_labels[arep[d]]);
    if (m.dummy_state && ssize[state_class[*m.dummy_state]] == 1) q.dummy_state = state_class[*m.dummy_state];
    if (m.dummy_action && asize[action_class[*m.dummy_action]] == 1)
        q.dummy_action = action_class[*m.dummy_action];
    return q;
}

MaximalReduction maximal_reduction(const SolvedMdp& m, std::optional<std::uint64_t> order_seed) {
    const int n = m.mdp.state_count();
    const int k = m.mdp.action_count();
    std::vector<Candidate> candidates;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) candidates.push_back({true, i, j});
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) candidates.push_back({false, i, j});
    if (order_seed) {
        Rng rng(*order_seed, 0x6d6178ULL);
        rng.shuffle(candidates);
    }

    const Merger merger(m);
    Partition states(n), actions(k);
    auto best = merger.attempt(states, actions);  // identity always verifies

    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& c : candidates) {
            Partition& part = c.is_state ? states : actions;
            if (part.find(c.i) == part.find(c.j)) continue;

            Partition s1 = states, a1 = actions;
            (c.is_state ? s1 : a1).unite(c.i, c.j);
            auto result = merger.attempt(s1, a1);
            if (!result) {
                merger.close(s1, a1);
                result = merger.attempt(s1, a1);
            }
            if (result) {
                states = std::move(s1);
                actions = std::move(a1);
                best = std::move(result);
                changed = true;
            }
        }
    }
    return std::move(*best);
}

} // namespace mdpalign
