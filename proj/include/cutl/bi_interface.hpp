#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"

namespace cutl {

// Graph with two injective partial colorings into [0, arity); a vertex in both
// interfaces carries the same color on both sides.
struct BiInterfaceGraph {
    int arity = 0;
    std::vector<std::vector<int>> adj;
    std::vector<int> left, right;  // -1 where undefined

    int vertex_count() const { return static_cast<int>(adj.size()); }

    int add_vertex(int l = -1, int r = -1) {
        adj.emplace_back();
        left.push_back(l);
        right.push_back(r);
        return vertex_count() - 1;
    }
    void add_edge(int u, int v) {
        if (u == v) return;
        if (std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end()) return;
        adj[u].push_back(v);
        adj[v].push_back(u);
    }

    void check() const {
        std::vector<int> seen_l(arity, 0), seen_r(arity, 0);
        for (int v = 0; v < vertex_count(); ++v) {
            if (left[v] >= arity || right[v] >= arity) throw InvalidArgument("interface color out of range");
            if (left[v] >= 0 && seen_l[left[v]]++) throw InvalidArgument("left interface not injective");
            if (right[v] >= 0 && seen_r[right[v]]++) throw InvalidArgument("right interface not injective");
            if (left[v] >= 0 && right[v] >= 0 && left[v] != right[v])
                throw InvalidArgument("shared interface vertex with two colors");
        }
    }
};

enum class Side : std::uint8_t { L = 0, R = 1, S = 2 };

// Basic bi-interface graph: vertices named (color, side), sorted by name.
struct BasicGraph {
    static constexpr int kMaxVertices = 64;

    std::uint8_t arity = 0;
    std::vector<std::uint16_t> names;  // 3 * color + side
    std::vector<std::uint64_t> adj;    // adjacency rows over name indices

    static std::uint16_t name(int color, Side s) { return static_cast<std::uint16_t>(3 * color + static_cast<int>(s)); }
    static int color_of(std::uint16_t nm) { return nm / 3; }
    static Side side_of(std::uint16_t nm) { return static_cast<Side>(nm % 3); }

    int vertex_count() const { return static_cast<int>(names.size()); }
    bool has_edge(int i, int j) const { return (adj[i] >> j) & 1; }
    int index_of(std::uint16_t nm) const {
        auto it = std::lower_bound(names.begin(), names.end(), nm);
        return it != names.end() && *it == nm ? static_cast<int>(it - names.begin()) : -1;
    }
    // Vertex carrying left (resp. right) color c, or -1.
    int left_vertex(int c) const {
        int i = index_of(name(c, Side::L));
        return i >= 0 ? i : index_of(name(c, Side::S));
    }
    int right_vertex(int c) const {
        int i = index_of(name(c, Side::R));
        return i >= 0 ? i : index_of(name(c, Side::S));
    }
    std::size_t edge_count() const {
        std::size_t e = 0;
        for (auto row : adj) e += std::popcount(row);
        return e / 2;
    }

    // Sorted name list, then upper-triangular adjacency bits.
    std::string encode() const {
        std::string out;
        out.push_back(static_cast<char>(arity));
        out.push_back(static_cast<char>(names.size()));
        for (auto nm : names) {
            out.push_back(static_cast<char>(nm & 0xff));
            out.push_back(static_cast<char>(nm >> 8));
        }
        std::uint8_t acc = 0;
        int bits = 0;
        for (int i = 0; i < vertex_count(); ++i)
            for (int j = i + 1; j < vertex_count(); ++j) {
                acc |= static_cast<std::uint8_t>(has_edge(i, j)) << bits;
                if (++bits == 8) out.push_back(static_cast<char>(acc)), acc = 0, bits = 0;
            }
        if (bits) out.push_back(static_cast<char>(acc));
        return out;
    }

    static BasicGraph decode(const std::string& s) {
        if (s.size() < 2) throw InvalidArgument("truncated basic graph encoding");
        BasicGraph g;
        g.arity = static_cast<std::uint8_t>(s[0]);
        const int n = static_cast<std::uint8_t>(s[1]);
        std::size_t pos = 2;
        if (s.size() < pos + 2 * n) throw InvalidArgument("truncated basic graph encoding");
        for (int i = 0; i < n; ++i, pos += 2)
            g.names.push_back(static_cast<std::uint16_t>(static_cast<std::uint8_t>(s[pos]) |
                                                         (static_cast<std::uint8_t>(s[pos + 1]) << 8)));
        g.adj.assign(n, 0);
        int bits = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++bits) {
                if (pos + bits / 8 >= s.size()) throw InvalidArgument("truncated basic graph encoding");
                if ((static_cast<std::uint8_t>(s[pos + bits / 8]) >> (bits % 8)) & 1) {
                    g.adj[i] |= std::uint64_t{1} << j;
                    g.adj[j] |= std::uint64_t{1} << i;
                }
            }
        return g;
    }

    friend bool operator==(const BasicGraph&, const BasicGraph&) = default;
};

struct BasicGraphHash {
    std::size_t operator()(const BasicGraph& g) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ g.arity;
        auto mix = [&](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        };
        for (auto nm : g.names) mix(nm);
        for (auto r : g.adj) mix(r);
        return static_cast<std::size_t>(h);
    }
};

inline BiInterfaceGraph to_bi_interface(const BasicGraph& b) {
    BiInterfaceGraph g;
    g.arity = b.arity;
    for (auto nm : b.names) {
        int c = BasicGraph::color_of(nm);
        Side s = BasicGraph::side_of(nm);
        g.add_vertex(s != Side::R ? c : -1, s != Side::L ? c : -1);
    }
    for (int i = 0; i < b.vertex_count(); ++i)
        for (int j = i + 1; j < b.vertex_count(); ++j)
            if (b.has_edge(i, j)) g.add_edge(i, j);
    return g;
}

// Abstraction: keep the interface vertices, renamed to (color, side), joined
// when some path between them avoids every other interface vertex.
inline BasicGraph abstract(const BiInterfaceGraph& g) {
    g.check();
    const int n = g.vertex_count();
    std::vector<int> iface;
    std::vector<std::uint16_t> nm(n, 0);
    for (int v = 0; v < n; ++v) {
        if (g.left[v] < 0 && g.right[v] < 0) continue;
        iface.push_back(v);
        if (g.left[v] >= 0 && g.right[v] >= 0) nm[v] = BasicGraph::name(g.left[v], Side::S);
        else if (g.left[v] >= 0) nm[v] = BasicGraph::name(g.left[v], Side::L);
        else nm[v] = BasicGraph::name(g.right[v], Side::R);
    }
    if (iface.size() > BasicGraph::kMaxVertices) throw TooLarge("basic graph exceeds 64 vertices");
    std::sort(iface.begin(), iface.end(), [&](int a, int b) { return nm[a] < nm[b]; });
    std::vector<int> idx(n, -1);
    BasicGraph out;
    out.arity = static_cast<std::uint8_t>(g.arity);
    for (std::size_t i = 0; i < iface.size(); ++i) {
        idx[iface[i]] = static_cast<int>(i);
        out.names.push_back(nm[iface[i]]);
    }
    out.adj.assign(iface.size(), 0);
    std::vector<int> seen(n, -1), queue;
    for (std::size_t i = 0; i < iface.size(); ++i) {
        int src = iface[i];
        queue.assign(1, src);
        seen[src] = static_cast<int>(i);
        for (std::size_t h = 0; h < queue.size(); ++h) {
            for (int w : g.adj[queue[h]]) {
                if (seen[w] == static_cast<int>(i)) continue;
                seen[w] = static_cast<int>(i);
                if (idx[w] >= 0) {
                    out.adj[i] |= std::uint64_t{1} << idx[w];
                    out.adj[idx[w]] |= std::uint64_t{1} << i;
                } else {
                    queue.push_back(w);
                }
            }
        }
    }
    return out;
}

// Glue right interface of g to left interface of h; keeps (left_g, right_h).
inline BiInterfaceGraph compose(const BiInterfaceGraph& g, const BiInterfaceGraph& h) {
    if (g.arity != h.arity) throw ArityMismatch("composition of different arities");
    BiInterfaceGraph out;
    out.arity = g.arity;
    std::vector<int> by_right(g.arity, -1);
    for (int v = 0; v < g.vertex_count(); ++v) {
        out.add_vertex(g.left[v], -1);
        if (g.right[v] >= 0) by_right[g.right[v]] = v;
    }
    for (int v = 0; v < g.vertex_count(); ++v)
        for (int w : g.adj[v])
            if (v < w) out.add_edge(v, w);
    std::vector<int> map(h.vertex_count());
    for (int v = 0; v < h.vertex_count(); ++v) {
        int c = h.left[v];
        if (c >= 0 && by_right[c] >= 0) {
            map[v] = by_right[c];
        } else {
            map[v] = out.add_vertex(-1, -1);
        }
        out.right[map[v]] = h.right[v];
    }
    for (int v = 0; v < h.vertex_count(); ++v)
        for (int w : h.adj[v])
            if (v < w) out.add_edge(map[v], map[w]);
    return out;
}

// a ⊙ b = abstract(a · b), computed on bitmasks.
inline BasicGraph compose_basic(const BasicGraph& a, const BasicGraph& b) {
    if (a.arity != b.arity) throw ArityMismatch("composition of different arities");
    if (a.arity > 64) throw TooLarge("arity above 64");
    const int na = a.vertex_count(), nb = b.vertex_count();
    int right_a[64];
    int map_b[64];
    std::uint64_t adj[128];
    std::uint16_t out_name[128];
    std::fill(right_a, right_a + a.arity, -1);
    for (int i = 0; i < na; ++i) {
        Side s = BasicGraph::side_of(a.names[i]);
        if (s != Side::L) right_a[BasicGraph::color_of(a.names[i])] = i;
    }
    int m = na;
    std::uint64_t iface = 0;
    for (int i = 0; i < na; ++i) {
        adj[i] = a.adj[i];
        Side s = BasicGraph::side_of(a.names[i]);
        if (s != Side::R) {
            iface |= std::uint64_t{1} << i;
            out_name[i] = BasicGraph::name(BasicGraph::color_of(a.names[i]), Side::L);
        }
    }
    for (int j = 0; j < nb; ++j) {
        int c = BasicGraph::color_of(b.names[j]);
        Side s = BasicGraph::side_of(b.names[j]);
        int target = s != Side::R ? right_a[c] : -1;
        if (target < 0) {
            if (m >= 64) throw TooLarge("composition exceeds 64 vertices");
            target = m++;
            adj[target] = 0;
        }
        map_b[j] = target;
        if (s != Side::L) {
            std::uint64_t bit = std::uint64_t{1} << target;
            out_name[target] = (iface & bit) ? BasicGraph::name(c, Side::S) : BasicGraph::name(c, Side::R);
            iface |= bit;
        }
    }
    for (int j = 0; j < nb; ++j) {
        std::uint64_t row = b.adj[j];
        while (row) {
            int k = std::countr_zero(row);
            row &= row - 1;
            adj[map_b[j]] |= std::uint64_t{1} << map_b[k];
        }
    }
    int order[64], cnt = 0;
    for (std::uint64_t it = iface; it; it &= it - 1) order[cnt++] = std::countr_zero(it);
    std::sort(order, order + cnt, [&](int x, int y) { return out_name[x] < out_name[y]; });
    int pos[64];
    for (int i = 0; i < cnt; ++i) pos[order[i]] = i;
    BasicGraph out;
    out.arity = a.arity;
    out.names.resize(cnt);
    out.adj.assign(cnt, 0);
    for (int i = 0; i < cnt; ++i) out.names[i] = out_name[order[i]];
    for (int i = 0; i < cnt; ++i) {
        int u = order[i];
        std::uint64_t reach = 0, seen = std::uint64_t{1} << u, frontier = adj[u];
        while (frontier) {
            frontier &= ~seen;
            seen |= frontier;
            reach |= frontier & iface;
            std::uint64_t inner = frontier & ~iface, next = 0;
            while (inner) {
                int k = std::countr_zero(inner);
                inner &= inner - 1;
                next |= adj[k];
            }
            frontier = next;
        }
        for (std::uint64_t r = reach; r; r &= r - 1) out.adj[i] |= std::uint64_t{1} << pos[std::countr_zero(r)];
    }
    return out;
}

}  // namespace cutl
