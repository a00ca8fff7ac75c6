#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "tree_decomposition.hpp"

namespace cutl {

// Per-node tables of a regular decomposition: bags, adhesions with their
// local positions, and the annotated bag graphs. The bag graph of x lives on
// bag(x); it keeps the edges of G[bag(x)] and adds an adhesion edge for every
// other pair inside some child adhesion, annotated with the supporting children.
struct BagGraphs {
    static constexpr std::int32_t kOriginal = -1;

    int n = 0;
    NodeId root = kNoNode;
    std::vector<NodeId> parent;
    std::vector<NodeId> owner;  // vertex -> node whose margin holds it
    std::vector<std::int32_t> margin_local;  // vertex -> local index in bag(owner)

    std::vector<std::uint32_t> bag_off;  // node -> slice of bag_verts
    std::vector<Vertex> bag_verts;

    std::vector<std::uint32_t> adh_off;       // node -> slice of the adhesion arrays
    std::vector<Vertex> adh_verts;            // sorted per node
    std::vector<std::int32_t> adh_local;      // local index inside own bag
    std::vector<std::int32_t> adh_up;         // local index inside the parent's bag

    std::vector<std::uint32_t> adj_off;       // bag slot -> slice of adjacency
    std::vector<std::int32_t> adj_nb;         // neighbour local index
    std::vector<std::int32_t> adj_edge;       // kOriginal or adhesion edge id
    std::vector<std::uint32_t> sup_off;       // adhesion edge -> slice of sup
    std::vector<NodeId> sup;

    int node_count() const { return static_cast<int>(parent.size()); }
    std::span<const Vertex> bag(NodeId x) const {
        return {bag_verts.data() + bag_off[x], bag_verts.data() + bag_off[x + 1]};
    }
    std::size_t bag_size(NodeId x) const { return bag_off[x + 1] - bag_off[x]; }
    std::span<const Vertex> adhesion(NodeId x) const {
        return {adh_verts.data() + adh_off[x], adh_verts.data() + adh_off[x + 1]};
    }
    std::span<const std::int32_t> adhesion_local(NodeId x) const {
        return {adh_local.data() + adh_off[x], adh_local.data() + adh_off[x + 1]};
    }
    std::span<const std::int32_t> adhesion_up(NodeId x) const {
        return {adh_up.data() + adh_off[x], adh_up.data() + adh_off[x + 1]};
    }
    std::size_t adhesion_size(NodeId x) const { return adh_off[x + 1] - adh_off[x]; }
    Vertex global(NodeId x, std::int32_t local) const { return bag_verts[bag_off[x] + local]; }
    std::uint32_t degree(NodeId x, std::int32_t local) const {
        std::size_t slot = bag_off[x] + local;
        return adj_off[slot + 1] - adj_off[slot];
    }
    std::span<const NodeId> supporters(std::int32_t edge) const {
        return {sup.data() + sup_off[edge], sup.data() + sup_off[edge + 1]};
    }

    // Local index of v in bag(x), or -1; scans at most |adh(x)| entries.
    std::int32_t local_index(NodeId x, Vertex v) const {
        if (owner[v] == x) return margin_local[v];
        auto a = adhesion(x);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] == v) return adh_local[adh_off[x] + i];
        return -1;
    }

    std::size_t adhesion_width() const {
        std::size_t a = 0;
        for (NodeId x = 0; x < node_count(); ++x) a = std::max(a, adhesion_size(x));
        return a;
    }
};

inline BagGraphs build_bag_graphs(const Graph& g, const TreeDecomposition& d) {
    const int n = g.vertex_count();
    const int N = d.node_count();
    DecompositionInfo info(d, n);
    BagGraphs b;
    b.n = n;
    b.root = d.root;
    b.parent = d.parent;
    b.owner = info.owners();
    for (Vertex v = 0; v < n; ++v)
        if (b.owner[v] == kNoNode) throw InvalidDecomposition("vertex in no bag");
    b.margin_local.assign(n, -1);
    b.bag_off.assign(N + 1, 0);
    b.adh_off.assign(N + 1, 0);
    for (NodeId x = 0; x < N; ++x) {
        b.bag_off[x + 1] = b.bag_off[x] + static_cast<std::uint32_t>(d.bags[x].size());
        b.adh_off[x + 1] = b.adh_off[x] + static_cast<std::uint32_t>(info.adhesion(x).size());
    }
    b.bag_verts.reserve(b.bag_off[N]);
    for (NodeId x = 0; x < N; ++x) {
        const auto& bag = d.bags[x];
        for (std::size_t i = 0; i < bag.size(); ++i)
            if (b.owner[bag[i]] == x) b.margin_local[bag[i]] = static_cast<std::int32_t>(i);
        b.bag_verts.insert(b.bag_verts.end(), bag.begin(), bag.end());
    }
    auto local_in = [&](NodeId x, Vertex v) {
        const auto& bag = d.bags[x];
        auto it = std::lower_bound(bag.begin(), bag.end(), v);
        return static_cast<std::int32_t>(it - bag.begin());
    };
    for (NodeId x = 0; x < N; ++x) {
        for (Vertex v : info.adhesion(x)) {
            b.adh_verts.push_back(v);
            b.adh_local.push_back(local_in(x, v));
            b.adh_up.push_back(local_in(d.parent[x], v));
        }
    }
    const auto& children = info.shape().children;
    b.adj_off.assign(b.bag_off[N] + 1, 0);
    b.sup_off.assign(1, 0);
    std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>> arcs;  // (from, to, edge)
    std::vector<std::tuple<std::int32_t, std::int32_t, NodeId>> pairs;
    for (NodeId x = 0; x < N; ++x) {
        const auto& bag = d.bags[x];
        const std::int32_t s = static_cast<std::int32_t>(bag.size());
        arcs.clear();
        std::size_t degsum = 0;
        for (Vertex v : bag) degsum += g.degree(v);
        if (static_cast<std::size_t>(s) * s <= degsum) {
            for (std::int32_t i = 0; i < s; ++i)
                for (std::int32_t j = i + 1; j < s; ++j)
                    if (g.adjacent(bag[i], bag[j])) {
                        arcs.emplace_back(i, j, BagGraphs::kOriginal);
                        arcs.emplace_back(j, i, BagGraphs::kOriginal);
                    }
        } else {
            for (std::int32_t i = 0; i < s; ++i)
                for (Vertex w : g.neighbors(bag[i])) {
                    if (w <= bag[i]) continue;
                    auto it = std::lower_bound(bag.begin(), bag.end(), w);
                    if (it == bag.end() || *it != w) continue;
                    std::int32_t j = static_cast<std::int32_t>(it - bag.begin());
                    arcs.emplace_back(i, j, BagGraphs::kOriginal);
                    arcs.emplace_back(j, i, BagGraphs::kOriginal);
                }
        }
        pairs.clear();
        for (NodeId z : children[x]) {
            auto up = b.adhesion_up(z);
            auto av = b.adhesion(z);
            for (std::size_t i = 0; i < up.size(); ++i)
                for (std::size_t j = i + 1; j < up.size(); ++j)
                    if (!g.adjacent(av[i], av[j])) pairs.emplace_back(std::min(up[i], up[j]), std::max(up[i], up[j]), z);
        }
        std::sort(pairs.begin(), pairs.end());
        for (std::size_t i = 0; i < pairs.size();) {
            std::size_t j = i;
            const std::int32_t e = static_cast<std::int32_t>(b.sup_off.size()) - 1;
            while (j < pairs.size() && std::get<0>(pairs[j]) == std::get<0>(pairs[i]) &&
                   std::get<1>(pairs[j]) == std::get<1>(pairs[i]))
                b.sup.push_back(std::get<2>(pairs[j++]));
            b.sup_off.push_back(static_cast<std::uint32_t>(b.sup.size()));
            arcs.emplace_back(std::get<0>(pairs[i]), std::get<1>(pairs[i]), e);
            arcs.emplace_back(std::get<1>(pairs[i]), std::get<0>(pairs[i]), e);
            i = j;
        }
        std::sort(arcs.begin(), arcs.end());
        const std::uint32_t base = b.bag_off[x];
        for (auto& [u, v, e] : arcs) {
            ++b.adj_off[base + u + 1];
            b.adj_nb.push_back(v);
            b.adj_edge.push_back(e);
        }
    }
    for (std::size_t p = 0; p + 1 < b.adj_off.size(); ++p) b.adj_off[p + 1] += b.adj_off[p];
    return b;
}

// Sizes of the bag graphs with children as vertices, against the bounds
// (a+2)|V(G)| and ||G|| + (a+2)^2 |V(G)|, where ||G|| = |V(G)| + |E(G)|.
struct TotalSize {
    std::size_t vertices = 0, size = 0, vertex_bound = 0, size_bound = 0;
    bool ok() const { return vertices <= vertex_bound && size <= size_bound; }
};

inline TotalSize total_bag_graph_size(const Graph& g, const TreeDecomposition& d) {
    DecompositionInfo info(d, g.vertex_count());
    const auto& children = info.shape().children;
    TotalSize t;
    const std::size_t a = info.adhesion_width();
    const std::size_t nv = g.vertex_count();
    for (NodeId x = 0; x < d.node_count(); ++x) {
        const auto& bag = d.bags[x];
        std::size_t verts = bag.size() + children[x].size();
        std::size_t edges = 0;
        for (std::size_t i = 0; i < bag.size(); ++i)
            for (std::size_t j = i + 1; j < bag.size(); ++j) edges += g.adjacent(bag[i], bag[j]);
        for (NodeId z : children[x]) edges += info.adhesion(z).size();
        t.vertices += verts;
        t.size += verts + edges;
    }
    t.vertex_bound = (a + 2) * nv;
    t.size_bound = g.size() + (a + 2) * (a + 2) * nv;
    return t;
}

}  // namespace cutl
