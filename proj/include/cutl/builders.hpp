#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <list>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "tree_decomposition.hpp"
#include "unbreakability.hpp"

namespace cutl {

inline TreeDecomposition build_trivial(const Graph& g) {
    TreeDecomposition d;
    d.parent = {kNoNode};
    d.bags.assign(1, {});
    for (Vertex v = 0; v < g.vertex_count(); ++v) d.bags[0].push_back(v);
    d.root = 0;
    return d;
}

// Maximum cardinality search; returns vertices in visit order.
inline std::vector<Vertex> mcs_order(const Graph& g) {
    const int n = g.vertex_count();
    std::vector<std::vector<Vertex>> bucket(n + 1);
    std::vector<int> weight(n, 0);
    std::vector<std::uint8_t> done(n, 0);
    for (Vertex v = n - 1; v >= 0; --v) bucket[0].push_back(v);
    std::vector<Vertex> order;
    order.reserve(n);
    int top = 0;
    while (static_cast<int>(order.size()) < n) {
        // lazy buckets: skip stale entries
        while (top >= 0) {
            auto& b = bucket[top];
            while (!b.empty() && (done[b.back()] || weight[b.back()] != top)) b.pop_back();
            if (!b.empty()) break;
            --top;
        }
        Vertex v = bucket[top].back();
        bucket[top].pop_back();
        done[v] = 1;
        order.push_back(v);
        for (Vertex w : g.neighbors(v))
            if (!done[w]) {
                bucket[++weight[w]].push_back(w);
                top = std::max(top, weight[w]);
            }
    }
    return order;
}

// True iff the reverse of `visit` is a perfect elimination ordering.
inline bool is_perfect_elimination(const Graph& g, const std::vector<Vertex>& visit) {
    const int n = g.vertex_count();
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[visit[i]] = i;
    for (Vertex v : visit) {
        Vertex p = -1;
        for (Vertex w : g.neighbors(v))
            if (pos[w] < pos[v] && (p < 0 || pos[w] > pos[p])) p = w;
        if (p < 0) continue;
        for (Vertex w : g.neighbors(v))
            if (pos[w] < pos[v] && w != p && !g.adjacent(w, p)) return false;
    }
    return true;
}

// Clique tree of a chordal graph: one bag per maximal clique.
inline TreeDecomposition build_clique_tree(const Graph& g) {
    const int n = g.vertex_count();
    if (n == 0) return build_trivial(g);
    auto visit = mcs_order(g);
    if (!is_perfect_elimination(g, visit)) throw NotChordal("graph is not chordal");
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[visit[i]] = i;
    TreeDecomposition d;
    std::vector<int> clique_of(n, -1);
    int prev_card = -1;
    std::vector<int> roots;
    for (Vertex v : visit) {
        std::vector<Vertex> left;
        Vertex latest = -1;
        for (Vertex w : g.neighbors(v))
            if (pos[w] < pos[v]) {
                left.push_back(w);
                if (latest < 0 || pos[w] > pos[latest]) latest = w;
            }
        const int card = static_cast<int>(left.size());
        if (card <= prev_card || d.bags.empty()) {
            left.push_back(v);
            std::sort(left.begin(), left.end());
            d.bags.push_back(left);
            NodeId par = latest < 0 ? kNoNode : clique_of[latest];
            d.parent.push_back(par);
            if (par == kNoNode) roots.push_back(static_cast<int>(d.bags.size()) - 1);
        } else {
            auto& b = d.bags.back();
            b.insert(std::upper_bound(b.begin(), b.end(), v), v);
        }
        clique_of[v] = static_cast<int>(d.bags.size()) - 1;
        prev_card = card;
    }
    d.root = roots.front();
    for (std::size_t i = 1; i < roots.size(); ++i) d.parent[roots[i]] = d.root;
    return d;
}

namespace detail {

// Minimum a-b vertex cut in g restricted to `alive`, if its size is at most limit.
inline std::optional<std::vector<Vertex>> small_vertex_cut(const Graph& g, const std::vector<std::uint8_t>& alive,
                                                           Vertex a, Vertex b, int limit) {
    // split graph: in(v) = 2v, out(v) = 2v + 1
    struct Arc {
        int to, cap;
    };
    const int n = g.vertex_count();
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj(2 * n);
    auto add = [&](int u, int v, int c) {
        adj[u].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({v, c});
        adj[v].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({u, 0});
    };
    const int inf = std::numeric_limits<int>::max() / 2;
    for (Vertex v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        add(2 * v, 2 * v + 1, (v == a || v == b) ? inf : 1);
        for (Vertex w : g.neighbors(v))
            if (alive[w]) add(2 * v + 1, 2 * w, inf);
    }
    const int src = 2 * a + 1, dst = 2 * b;
    int flow = 0;
    std::vector<int> via(2 * n);
    while (true) {
        std::fill(via.begin(), via.end(), -1);
        std::vector<int> queue{src};
        via[src] = -2;
        for (std::size_t i = 0; i < queue.size() && via[dst] == -1; ++i)
            for (int e : adj[queue[i]])
                if (arcs[e].cap > 0 && via[arcs[e].to] == -1) {
                    via[arcs[e].to] = e;
                    queue.push_back(arcs[e].to);
                }
        if (via[dst] == -1) break;
        for (int x = dst; x != src; x = arcs[via[x] ^ 1].to) {
            arcs[via[x]].cap -= 1;
            arcs[via[x] ^ 1].cap += 1;
        }
        if (++flow > limit) return std::nullopt;
    }
    std::vector<Vertex> cut;
    for (Vertex v = 0; v < n; ++v)
        if (alive[v] && via[2 * v] != -1 && via[2 * v + 1] == -1) cut.push_back(v);
    return cut;
}

}  // namespace detail

struct HeuristicResult {
    bool ok = false;
    TreeDecomposition decomposition;
    int q = 0;
    std::string reason;
};

// Repeatedly splits off pieces along vertex cuts of size at most k, keeps the
// largest remaining piece in the current bag, then certifies the result.
inline HeuristicResult build_heuristic(const Graph& g, int k, int q_target, Mode mode = Mode::Strong,
                                       const SearchBudget& budget = {}) {
    const int n = g.vertex_count();
    HeuristicResult res;
    if (n == 0) {
        res.ok = true;
        res.decomposition = build_trivial(g);
        return res;
    }
    struct Piece {
        std::vector<Vertex> verts, protect;
        NodeId parent;
    };
    TreeDecomposition d;
    std::vector<Piece> work;
    {
        auto blocks = components_avoiding(g, VertexSet(n));
        if (blocks.size() == 1) {
            work.push_back({blocks[0], {}, kNoNode});
        } else {
            d.parent.push_back(kNoNode);
            d.bags.emplace_back();
            d.root = 0;
            for (auto& b : blocks) work.push_back({b, {}, 0});
        }
    }
    std::vector<std::uint8_t> alive(n, 0), prot(n, 0);
    while (!work.empty()) {
        Piece piece = std::move(work.back());
        work.pop_back();
        std::vector<Vertex> cur = piece.verts;
        for (Vertex v : piece.protect) prot[v] = 1;
        std::vector<Piece> kids;
        bool split = true;
        while (split) {
            split = false;
            for (Vertex v : cur) alive[v] = 1;
            for (std::size_t i = 0; i < cur.size() && !split; ++i) {
                Vertex a = cur[i];
                if (prot[a]) continue;
                for (std::size_t j = i + 1; j < cur.size() && !split; ++j) {
                    Vertex b = cur[j];
                    if (prot[b] || g.adjacent(a, b)) continue;
                    auto cut = detail::small_vertex_cut(g, alive, a, b, k);
                    if (!cut) continue;
                    // components of G[cur] - (protected ∪ cut)
                    VertexSet blocked(n);
                    for (Vertex v = 0; v < n; ++v)
                        if (!alive[v] || prot[v]) blocked.insert(v);
                    for (Vertex v : *cut) blocked.insert(v);
                    auto comps = components_avoiding(g, blocked);
                    if (comps.size() < 2) continue;
                    std::size_t keep = 0;
                    for (std::size_t c = 1; c < comps.size(); ++c)
                        if (comps[c].size() > comps[keep].size()) keep = c;
                    std::vector<Vertex> next;
                    for (Vertex v : cur)
                        if (prot[v] || std::binary_search(cut->begin(), cut->end(), v)) next.push_back(v);
                    next.insert(next.end(), comps[keep].begin(), comps[keep].end());
                    for (std::size_t c = 0; c < comps.size(); ++c) {
                        if (c == keep) continue;
                        std::vector<Vertex> nb;
                        for (Vertex u : comps[c])
                            for (Vertex w : g.neighbors(u))
                                if (alive[w] && (prot[w] || std::binary_search(cut->begin(), cut->end(), w)))
                                    nb.push_back(w);
                        std::sort(nb.begin(), nb.end());
                        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
                        for (Vertex w : nb) prot[w] = 1;
                        auto verts = comps[c];
                        verts.insert(verts.end(), nb.begin(), nb.end());
                        std::sort(verts.begin(), verts.end());
                        kids.push_back({std::move(verts), std::move(nb), kNoNode});
                    }
                    for (Vertex v : cur) alive[v] = 0;
                    std::sort(next.begin(), next.end());
                    next.erase(std::unique(next.begin(), next.end()), next.end());
                    cur = std::move(next);
                    split = true;
                }
            }
            if (!split)
                for (Vertex v : cur) alive[v] = 0;
        }
        for (Vertex v = 0; v < n; ++v) prot[v] = 0;
        NodeId id = static_cast<NodeId>(d.bags.size());
        d.bags.push_back(cur);
        d.parent.push_back(piece.parent);
        if (piece.parent == kNoNode) d.root = id;
        for (auto& kid : kids) {
            kid.parent = id;
            work.push_back(std::move(kid));
        }
    }
    try {
        res.decomposition = regularize(g, d);
        res.q = minimal_certified_q(g, res.decomposition, k, mode, budget);
    } catch (const TooLarge& e) {
        res.reason = e.what();
        return res;
    }
    if (res.q > q_target) {
        res.reason = "achieved q=" + std::to_string(res.q) + " exceeds target " + std::to_string(q_target);
        return res;
    }
    res.ok = true;
    return res;
}

}  // namespace cutl
