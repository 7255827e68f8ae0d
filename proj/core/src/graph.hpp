#pragma once

// Small directed-graph helpers shared by the chain and optimality code.

#include <algorithm>
#include <numeric>
#include <vector>

namespace mdpalign::detail {

using Adjacency = std::vector<std::vector<int>>;

inline std::vector<char> reachable_from(const Adjacency& adj, const std::vector<int>& sources) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack;
    for (int s : sources) {
        if (!seen[s]) {
            seen[s] = 1;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

/// Tarjan's algorithm restricted to vertices with mask[v] != 0. Returns the
/// component id of each vertex (-1 outside the mask) and the component count.
inline std::pair<std::vector<int>, int> strongly_connected(const Adjacency& adj,
                                                           const std::vector<char>& mask) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int counter = 0;
    int comps = 0;

    // Iterative DFS: (vertex, next edge position).
    std::vector<std::pair<int, std::size_t>> work;
    for (int root = 0; root < n; ++root) {
        if (!mask[root] || index[root] >= 0) continue;
        work.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!work.empty()) {
            auto& [u, pos] = work.back();
            if (pos < adj[u].size()) {
                const int v = adj[u][pos++];
                if (!mask[v]) continue;
                if (index[v] < 0) {
                    index[v] = low[v] = counter++;
                    stack.push_back(v);
                    on_stack[v] = 1;
                    work.emplace_back(v, 0);
                } else if (on_stack[v]) {
                    low[u] = std::min(low[u], index[v]);
                }
                continue;
            }
            const int done = u;
            work.pop_back();
            if (!work.empty()) {
                const int parent = work.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                } while (w != done);
                ++comps;
            }
        }
    }
    return {comp, comps};
}

/// Closed strongly connected components (no edge leaves them) within the mask,
/// each sorted, ordered by their smallest vertex.
inline std::vector<std::vector<int>> closed_components(const Adjacency& adj,
                                                       const std::vector<char>& mask) {
    auto [comp, count] = strongly_connected(adj, mask);
    std::vector<char> closed(count, 1);
    const int n = static_cast<int>(adj.size());
    for (int u = 0; u < n; ++u) {
        if (comp[u] < 0) continue;
        for (int v : adj[u])
            if (comp[v] != comp[u]) closed[comp[u]] = 0;
    }
    std::vector<std::vector<int>> out(count);
    for (int u = 0; u < n; ++u)
        if (comp[u] >= 0 && closed[comp[u]]) out[comp[u]].push_back(u);
    std::erase_if(out, [](const auto& c) { return c.empty(); });
    std::sort(out.begin(), out.end());
    return out;
}

/// Period of a strongly connected vertex set: gcd of level differences.
inline int period_of(const Adjacency& adj, const std::vector<int>& cls) {
    std::vector<int> level(adj.size(), -1);
    std::vector<char> in(adj.size(), 0);
    for (int v : cls) in[v] = 1;
    std::vector<int> queue{cls.front()};
    level[cls.front()] = 0;
    int g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v : adj[u]) {
            if (!in[v]) continue;
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    return g == 0 ? 1 : g;
}

} // namespace mdpalign::detail
