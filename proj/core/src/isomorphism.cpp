#include "mdpalign/multitask.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace mdpalign {

namespace {

// Only O and the dynamics of optimal pairs take part: the rest of a quotient is
// fixed by representative choice, which no reduction constrains.

// Action-permutation invariant colour refinement, run on both MDPs with a
// shared colour dictionary so colours are comparable across them.
std::pair<std::vector<int>, std::vector<int>> refine(const TabularMdp& ma, const OptimalityModel& oa,
                                                     const TabularMdp& mb, const OptimalityModel& ob) {
    std::vector<int> ca(ma.state_count(), 0), cb(mb.state_count(), 0);
    const int rounds = ma.state_count() + 1;
    for (int round = 0; round < rounds; ++round) {
        std::map<std::vector<int>, int> dict;
        auto signature = [](const TabularMdp& m, const OptimalityModel& o, const std::vector<int>& c, int s) {
            std::vector<std::pair<int, int>> edges;
            for (int a = 0; a < m.action_count(); ++a)
                edges.emplace_back(o.O(s, a) ? 1 : 0, o.O(s, a) ? c[m.next(s, a)] : -1);
            std::sort(edges.begin(), edges.end());
            std::vector<int> sig{c[s]};
            for (const auto& [opt, col] : edges) {
                sig.push_back(opt);
                sig.push_back(col);
            }
            return sig;
        };
        std::vector<std::vector<int>> sa, sb;
        for (int s = 0; s < ma.state_count(); ++s) sa.push_back(signature(ma, oa, ca, s));
        for (int s = 0; s < mb.state_count(); ++s) sb.push_back(signature(mb, ob, cb, s));
        for (const auto& sig : sa) dict.emplace(sig, 0);
        for (const auto& sig : sb) dict.emplace(sig, 0);
        int next = 0;
        for (auto& [sig, id] : dict) id = next++;
        std::vector<int> na(ca.size()), nb(cb.size());
        for (std::size_t s = 0; s < sa.size(); ++s) na[s] = dict[sa[s]];
        for (std::size_t s = 0; s < sb.size(); ++s) nb[s] = dict[sb[s]];
        const bool stable = na == ca && nb == cb;
        ca = std::move(na);
        cb = std::move(nb);
        if (stable) break;
    }
    return {ca, cb};
}

class Matcher {
public:
    Matcher(const TabularMdp& ma, const OptimalityModel& oa, const TabularMdp& mb, const OptimalityModel& ob,
            std::vector<int> ca, std::vector<int> cb)
        : ma_(ma), oa_(oa), mb_(mb), ob_(ob), ca_(std::move(ca)), cb_(std::move(cb)) {}

    bool match(const std::vector<int>& action_map) {
        act_ = &action_map;
        const int n = ma_.state_count();
        map_.assign(n, -1);
        used_.assign(n, 0);
        return assign(0);
    }

    const std::vector<int>& state_map() const { return map_; }

private:
    bool compatible(int s, int t) const {
        if (ca_[s] != cb_[t]) return false;
        for (int a = 0; a < ma_.action_count(); ++a)
            if (oa_.O(s, a) != ob_.O(t, (*act_)[a])) return false;
        return true;
    }

    bool consistent(int s) const {
        for (int u = 0; u <= s; ++u)
            for (int a = 0; a < ma_.action_count(); ++a) {
                if (!oa_.O(u, a)) continue;
                const int v = ma_.next(u, a);
                if (v > s || (u != s && v != s)) continue;
                if (map_[v] != mb_.next(map_[u], (*act_)[a])) return false;
            }
        return true;
    }

    bool assign(int s) {
        if (s == ma_.state_count()) return true;
        for (int t = 0; t < mb_.state_count(); ++t) {
            if (used_[t] || !compatible(s, t)) continue;
            map_[s] = t;
            used_[t] = 1;
            if (consistent(s) && assign(s + 1)) return true;
            used_[t] = 0;
        }
        map_[s] = -1;
        return false;
    }

    const TabularMdp& ma_;
    const OptimalityModel& oa_;
    const TabularMdp& mb_;
    const OptimalityModel& ob_;
    std::vector<int> ca_, cb_;
    const std::vector<int>* act_ = nullptr;
    std::vector<int> map_;
    std::vector<char> used_;
};

} // namespace

std::optional<ReductionMap> find_isomorphism(const TabularMdp& ma, const OptimalityModel& oa,
                                             const TabularMdp& mb, const OptimalityModel& ob) {
    if (ma.state_count() != mb.state_count() || ma.action_count() != mb.action_count()) return std::nullopt;
    auto [ca, cb] = refine(ma, oa, mb, ob);
    auto sa = ca, sb = cb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;

    Matcher matcher(ma, oa, mb, ob, std::move(ca), std::move(cb));
    std::vector<int> action_map(ma.action_count());
    std::iota(action_map.begin(), action_map.end(), 0);
    do {
        if (matcher.match(action_map)) return ReductionMap{matcher.state_map(), action_map};
    } while (std::next_permutation(action_map.begin(), action_map.end()));
    return std::nullopt;
}

} // namespace mdpalign
