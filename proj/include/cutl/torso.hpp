#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <iterator>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bag_graph.hpp"
#include "bi_interface.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "path_product.hpp"
#include "semigroup.hpp"
#include "tree_decomposition.hpp"
#include "tree_nav.hpp"

namespace cutl {

enum class TorsoBackend { Trivial, Semigroup };

inline const char* to_string(TorsoBackend b) { return b == TorsoBackend::Trivial ? "trivial" : "semigroup"; }
inline TorsoBackend parse_backend(const std::string& s) {
    if (s == "trivial") return TorsoBackend::Trivial;
    if (s == "semigroup") return TorsoBackend::Semigroup;
    throw InvalidArgument("unknown torso backend: " + s);
}

// Graph on adh(x) ∪ adh(y): sorted vertices, edges as sorted pairs (u < v).
struct TorsoGraph {
    std::vector<Vertex> vertices;
    std::vector<std::pair<Vertex, Vertex>> edges;
    friend bool operator==(const TorsoGraph&, const TorsoGraph&) = default;
};

// Colors of adhesion vertices, parallel to BagGraphs::adh_verts.
struct AdhesionColoring {
    int arity = 0;
    std::vector<std::uint8_t> color;
};

inline AdhesionColoring compute_adhesion_colorings(const BagGraphs& b, int q) {
    if (q < 0) throw InvalidArgument("negative q");
    if (2 * q > 250) throw TooLarge("arity above 250");
    AdhesionColoring c;
    c.arity = 2 * q;
    c.color.assign(b.adh_verts.size(), 0);
    TreeShape shape(b.parent);
    std::vector<std::uint8_t> used(c.arity + 1);
    std::vector<std::size_t> fresh;
    for (NodeId y : shape.preorder) {
        if (b.adhesion_size(y) > static_cast<std::size_t>(q))
            throw AdhesionTooLarge("adhesion of node " + std::to_string(y) + " exceeds q");
        NodeId x = b.parent[y];
        if (x == kNoNode) continue;
        auto ax = b.adhesion(x);
        auto ay = b.adhesion(y);
        std::fill(used.begin(), used.end(), 0);
        for (std::size_t i = 0; i < ax.size(); ++i) used[c.color[b.adh_off[x] + i]] = 1;
        fresh.clear();
        std::size_t i = 0;
        for (std::size_t j = 0; j < ay.size(); ++j) {
            while (i < ax.size() && ax[i] < ay[j]) ++i;
            if (i < ax.size() && ax[i] == ay[j]) c.color[b.adh_off[y] + j] = c.color[b.adh_off[x] + i];
            else fresh.push_back(j);
        }
        int next = 0;
        for (std::size_t j : fresh) {
            while (used[next]) ++next;
            c.color[b.adh_off[y] + j] = static_cast<std::uint8_t>(next++);
        }
    }
    return c;
}

namespace detail {

inline BasicGraph name_interfaces(int arity, std::vector<std::uint16_t>& names) {
    BasicGraph out;
    out.arity = static_cast<std::uint8_t>(arity);
    std::sort(names.begin(), names.end());
    out.names = names;
    out.adj.assign(names.size(), 0);
    return out;
}

}  // namespace detail

// σ(xy) for the edge into y: the abstraction of G[cone(x) \ comp(y)] with
// interfaces λ_x on adh(x) and λ_y on adh(y), read off the bag graph of x.
inline BasicGraph edge_label(const BagGraphs& b, const AdhesionColoring& c, NodeId y) {
    const NodeId x = b.parent[y];
    if (x == kNoNode) throw InvalidArgument("edge_label: root has no parent edge");
    const std::int32_t s = static_cast<std::int32_t>(b.bag_size(x));
    std::vector<int> mark(s, -1);  // interface slot, or -1
    std::vector<std::int32_t> iface;
    std::vector<std::uint16_t> nm;
    std::vector<std::uint8_t> left(s, 0xff), right(s, 0xff);
    for (std::size_t i = 0; i < b.adhesion_size(x); ++i) left[b.adh_local[b.adh_off[x] + i]] = c.color[b.adh_off[x] + i];
    for (std::size_t i = 0; i < b.adhesion_size(y); ++i) right[b.adh_up[b.adh_off[y] + i]] = c.color[b.adh_off[y] + i];
    for (std::int32_t v = 0; v < s; ++v) {
        if (left[v] == 0xff && right[v] == 0xff) continue;
        std::uint16_t name = left[v] != 0xff && right[v] != 0xff ? BasicGraph::name(left[v], Side::S)
                             : left[v] != 0xff                   ? BasicGraph::name(left[v], Side::L)
                                                                 : BasicGraph::name(right[v], Side::R);
        iface.push_back(v);
        nm.push_back(name);
    }
    std::vector<std::uint16_t> sorted = nm;
    BasicGraph out = detail::name_interfaces(c.arity, sorted);
    for (std::size_t i = 0; i < iface.size(); ++i) mark[iface[i]] = out.index_of(nm[i]);
    auto usable = [&](std::uint32_t arc) {
        std::int32_t e = b.adj_edge[arc];
        if (e == BagGraphs::kOriginal) return true;
        auto sup = b.supporters(e);
        return !(sup.size() == 1 && sup[0] == y);
    };
    std::vector<int> seen(s, -1);
    std::vector<std::int32_t> queue;
    const std::uint32_t base = b.bag_off[x];
    for (std::size_t i = 0; i < iface.size(); ++i) {
        const int src = mark[iface[i]];
        queue.assign(1, iface[i]);
        seen[iface[i]] = src;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const std::int32_t u = queue[h];
            for (std::uint32_t arc = b.adj_off[base + u]; arc < b.adj_off[base + u + 1]; ++arc) {
                const std::int32_t w = b.adj_nb[arc];
                if (seen[w] == src || !usable(arc)) continue;
                seen[w] = src;
                if (mark[w] >= 0) {
                    out.adj[src] |= std::uint64_t{1} << mark[w];
                    out.adj[mark[w]] |= std::uint64_t{1} << src;
                } else {
                    queue.push_back(w);
                }
            }
        }
    }
    return out;
}

// Translate a basic graph on (color, side) names back to adh(x) ∪ adh(y).
inline TorsoGraph decode_torso(const BagGraphs& b, const AdhesionColoring& c, NodeId x, NodeId y,
                               const BasicGraph& g) {
    auto vertex_of = [&](std::uint16_t nm) -> Vertex {
        const int col = BasicGraph::color_of(nm);
        const NodeId at = BasicGraph::side_of(nm) == Side::R ? y : x;
        for (std::size_t i = 0; i < b.adhesion_size(at); ++i)
            if (c.color[b.adh_off[at] + i] == col) return b.adh_verts[b.adh_off[at] + i];
        throw InvalidArgument("basic graph names a color absent from the adhesion");
    };
    TorsoGraph t;
    std::vector<Vertex> ids(g.vertex_count());
    for (int i = 0; i < g.vertex_count(); ++i) ids[i] = vertex_of(g.names[i]);
    auto ax = b.adhesion(x), ay = b.adhesion(y);
    std::set_union(ax.begin(), ax.end(), ay.begin(), ay.end(), std::back_inserter(t.vertices));
    for (int i = 0; i < g.vertex_count(); ++i)
        for (int j = i + 1; j < g.vertex_count(); ++j)
            if (g.has_edge(i, j)) t.edges.emplace_back(std::min(ids[i], ids[j]), std::max(ids[i], ids[j]));
    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

// torso(x, y) straight from the definition: BFS in G[cone(x) \ comp(y)] from
// every vertex of adh(x) ∪ adh(y), never passing through those vertices.
inline TorsoGraph naive_torso(const Graph& g, const TreeDecomposition& d, NodeId x, NodeId y) {
    DecompositionInfo info(d, g.vertex_count());
    const TreeShape& shape = info.shape();
    if (x == y || !shape.in_subtree(x, y)) throw NotStrictAncestor("naive_torso: x is not a strict ancestor of y");
    const auto& ax = info.adhesion(x);
    const auto& ay = info.adhesion(y);
    auto allowed = [&](Vertex v) {
        NodeId o = info.owner(v);
        bool in_cone = shape.in_subtree(x, o) || std::binary_search(ax.begin(), ax.end(), v);
        return in_cone && !shape.in_subtree(y, o);
    };
    TorsoGraph t;
    std::set_union(ax.begin(), ax.end(), ay.begin(), ay.end(), std::back_inserter(t.vertices));
    const int n = g.vertex_count();
    std::vector<char> is_iface(n, 0);
    for (Vertex v : t.vertices) is_iface[v] = 1;
    std::vector<int> seen(n, -1);
    std::vector<Vertex> queue;
    for (std::size_t i = 0; i < t.vertices.size(); ++i) {
        const Vertex src = t.vertices[i];
        queue.assign(1, src);
        seen[src] = static_cast<int>(i);
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (Vertex w : g.neighbors(queue[h])) {
                if (seen[w] == static_cast<int>(i) || !allowed(w)) continue;
                seen[w] = static_cast<int>(i);
                if (is_iface[w]) {
                    if (src < w) t.edges.emplace_back(src, w);
                } else {
                    queue.push_back(w);
                }
            }
    }
    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

// torso(x, y) for strict ancestors x of y. The trivial backend tabulates every
// pair; the semigroup backend answers path products over the edge labels.
class TorsoIndex {
public:
    using Table = SemigroupTable<BasicGraph, BasicGraphHash>;

    TorsoIndex() = default;

    static constexpr std::size_t kMaxPairs = 200'000'000;

    TorsoIndex(const BagGraphs& b, const NavIndex& nav, int q, TorsoBackend backend,
               std::size_t budget = 2'000'000)
        : bags_(&b), nav_(&nav), backend_(backend), q_(q) {
        coloring_ = compute_adhesion_colorings(b, q);
        const int N = b.node_count();
        TreeShape shape(b.parent);
        preorder_ = shape.preorder;
        std::vector<BasicGraph> distinct;
        std::unordered_map<BasicGraph, std::uint32_t, BasicGraphHash> seen;
        edge_label_id_.assign(N, 0);
        for (NodeId y = 0; y < N; ++y) {
            if (b.parent[y] == kNoNode) continue;
            BasicGraph lab = edge_label(b, coloring_, y);
            auto [it, fresh] = seen.emplace(lab, static_cast<std::uint32_t>(distinct.size()));
            if (fresh) distinct.push_back(std::move(lab));
            edge_label_id_[y] = it->second;
        }
        if (backend == TorsoBackend::Trivial) build_trivial(distinct);
        else build_semigroup(distinct, budget);
    }

    void rebind(const BagGraphs& b, const NavIndex& nav) {
        bags_ = &b;
        nav_ = &nav;
        path_.rebind(nav);
    }

    TorsoBackend backend() const { return backend_; }
    int q() const { return q_; }
    const AdhesionColoring& coloring() const { return coloring_; }

    // σ of the edge into y.
    const BasicGraph& label(NodeId y) const {
        if (backend_ == TorsoBackend::Trivial) return basics_[table_[row_off_[y] + nav_->depth(y) - 1]];
        return semigroup_.element(labels_[y]);
    }

    const BasicGraph& basic(NodeId x, NodeId y) const {
        if (x == y || !nav_->is_ancestor(x, y)) throw NotStrictAncestor("torso: x is not a strict ancestor of y");
        return basic_unchecked(x, y);
    }
    const BasicGraph& basic_unchecked(NodeId x, NodeId y) const {
        if (backend_ == TorsoBackend::Trivial) return basics_[table_[row_off_[y] + nav_->depth(x)]];
        return semigroup_.element(path_.path_product(x, y));
    }

    TorsoGraph torso(NodeId x, NodeId y) const { return decode_torso(*bags_, coloring_, x, y, basic(x, y)); }

    // Calls f(u, v) for each edge of torso(x, y) without materializing it.
    template <class F>
    void for_each_edge(NodeId x, NodeId y, F&& f) const {
        const BasicGraph& g = basic_unchecked(x, y);
        Vertex ids[64];
        for (int i = 0; i < g.vertex_count(); ++i) {
            const std::uint16_t nm = g.names[i];
            const NodeId at = BasicGraph::side_of(nm) == Side::R ? y : x;
            const int col = BasicGraph::color_of(nm);
            for (std::uint32_t j = bags_->adh_off[at]; j < bags_->adh_off[at + 1]; ++j)
                if (coloring_.color[j] == col) ids[i] = bags_->adh_verts[j];
        }
        for (int i = 0; i < g.vertex_count(); ++i)
            for (std::uint64_t row = g.adj[i] >> (i + 1) << (i + 1); row; row &= row - 1) f(ids[i], ids[std::countr_zero(row)]);
    }

    std::size_t semigroup_size() const { return backend_ == TorsoBackend::Semigroup ? semigroup_.size() : 0; }
    std::size_t distinct_basics() const {
        return backend_ == TorsoBackend::Trivial ? basics_.size() : semigroup_.size() - 1;
    }
    std::size_t pair_count() const { return table_.size(); }
    const PathIndex<BasicGraph, BasicGraphHash>& path() const { return path_; }

    std::size_t memory_bytes() const {
        std::size_t m = coloring_.color.size() + edge_label_id_.size() * 4 + table_.size() * 4 + row_off_.size() * 8 +
                        labels_.size() * 4 + path_.functional().memory_bytes() + semigroup_.right_table().size() * 4;
        for (const auto& g : basics_) m += g.names.size() * 10;
        for (const auto& g : semigroup_.elements()) m += g.names.size() * 10;
        return m;
    }

    // Raw parts for serialization.
    const std::vector<std::uint32_t>& edge_label_ids() const { return edge_label_id_; }
    const std::vector<BasicGraph>& trivial_basics() const { return basics_; }
    const std::vector<std::uint32_t>& trivial_table() const { return table_; }
    const std::vector<std::uint64_t>& trivial_rows() const { return row_off_; }
    const Table& semigroup() const { return semigroup_; }
    const std::vector<std::uint32_t>& semigroup_labels() const { return labels_; }

    struct Parts {
        TorsoBackend backend;
        int q;
        AdhesionColoring coloring;
        std::vector<std::uint32_t> edge_label_id;
        std::vector<BasicGraph> basics;
        std::vector<std::uint32_t> table;
        std::vector<std::uint64_t> rows;
        std::vector<BasicGraph> elements;
        std::vector<std::uint32_t> gens, right, labels;
    };

    static TorsoIndex restore(const BagGraphs& b, const NavIndex& nav, Parts p) {
        TorsoIndex t;
        t.bags_ = &b;
        t.nav_ = &nav;
        t.backend_ = p.backend;
        t.q_ = p.q;
        t.coloring_ = std::move(p.coloring);
        t.edge_label_id_ = std::move(p.edge_label_id);
        t.preorder_ = TreeShape(b.parent).preorder;
        if (p.backend == TorsoBackend::Trivial) {
            t.basics_ = std::move(p.basics);
            t.table_ = std::move(p.table);
            t.row_off_ = std::move(p.rows);
        } else {
            t.semigroup_ = Table::restore(std::move(p.elements), std::move(p.gens), std::move(p.right), compose_basic);
            t.labels_ = std::move(p.labels);
            t.path_ = PathIndex<BasicGraph, BasicGraphHash>(t.semigroup_, nav, t.preorder_, t.labels_);
        }
        return t;
    }

private:
    void build_trivial(const std::vector<BasicGraph>& distinct) {
        const int N = bags_->node_count();
        row_off_.assign(N + 1, 0);
        for (NodeId y = 0; y < N; ++y) row_off_[y + 1] = row_off_[y] + nav_->depth(y);
        if (row_off_[N] > kMaxPairs) throw TooLarge("trivial torso table exceeds the pair budget");
        table_.assign(row_off_[N], 0);
        basics_ = distinct;
        std::unordered_map<BasicGraph, std::uint32_t, BasicGraphHash> ids;
        for (std::size_t i = 0; i < basics_.size(); ++i) ids.emplace(basics_[i], static_cast<std::uint32_t>(i));
        // row of y from the row of its parent: torso(x, y) = torso(x, parent) ⊙ σ(parent, y)
        for (NodeId y : preorder_) {
            NodeId p = bags_->parent[y];
            if (p == kNoNode) continue;
            const BasicGraph& lab = basics_[edge_label_id_[y]];
            const int dp = nav_->depth(p);
            for (int dx = 0; dx < dp; ++dx) {
                BasicGraph prod = compose_basic(basics_[table_[row_off_[p] + dx]], lab);
                auto [it, fresh] = ids.emplace(std::move(prod), static_cast<std::uint32_t>(basics_.size()));
                if (fresh) basics_.push_back(it->first);
                table_[row_off_[y] + dx] = it->second;
            }
            table_[row_off_[y] + dp] = edge_label_id_[y];
        }
    }

    void build_semigroup(const std::vector<BasicGraph>& distinct, std::size_t budget) {
        semigroup_ = Table::close(distinct, compose_basic, budget);
        const int N = bags_->node_count();
        labels_.assign(N, Table::kIdentity);
        for (NodeId y = 0; y < N; ++y)
            if (bags_->parent[y] != kNoNode) labels_[y] = semigroup_.find(distinct[edge_label_id_[y]]);
        path_ = PathIndex<BasicGraph, BasicGraphHash>(semigroup_, *nav_, preorder_, labels_);
    }

    const BagGraphs* bags_ = nullptr;
    const NavIndex* nav_ = nullptr;
    TorsoBackend backend_ = TorsoBackend::Semigroup;
    int q_ = 0;
    AdhesionColoring coloring_;
    std::vector<NodeId> preorder_;
    std::vector<std::uint32_t> edge_label_id_;  // node -> index into the distinct labels
    // trivial
    std::vector<BasicGraph> basics_;
    std::vector<std::uint64_t> row_off_;  // y -> row over ancestors by depth
    std::vector<std::uint32_t> table_;
    // semigroup
    Table semigroup_;
    std::vector<std::uint32_t> labels_;
    PathIndex<BasicGraph, BasicGraphHash> path_;
};

}  // namespace cutl
