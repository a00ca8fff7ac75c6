#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cutl/builders.hpp"
#include "cutl/torso.hpp"
#include "test_util.hpp"

using namespace cutl;

namespace {

struct Prepared {
    Graph g;
    TreeDecomposition d;
    int q;
};

// Regular decomposition with adhesion at most 4.
Prepared prepared(std::mt19937_64& rng, int max_n = 40) {
    for (;;) {
        int n = 1 + static_cast<int>(rng() % max_n);
        int nodes = 1 + static_cast<int>(rng() % 14);
        auto inst = testutil::random_decomposed(n, nodes, 0.45, rng);
        auto d = regularize(inst.g, inst.d);
        int a = static_cast<int>(adhesion_width(d));
        if (a <= 4) return {inst.g, d, std::max(a, 1)};
    }
}

std::vector<std::pair<NodeId, NodeId>> ancestor_pairs(const NavIndex& nav) {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId y = 0; y < nav.size(); ++y)
        for (NodeId x = nav.parent(y); x != kNoNode; x = nav.parent(x)) out.emplace_back(x, y);
    return out;
}

// Abstraction of the context graph G[cone(x) \ comp(y)] built explicitly.
BasicGraph context_abstraction(const Graph& g, const TreeDecomposition& d, const BagGraphs& b,
                               const AdhesionColoring& c, NodeId x, NodeId y) {
    DecompositionInfo info(d, g.vertex_count());
    const auto& shape = info.shape();
    std::vector<Vertex> keep;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        NodeId o = info.owner(v);
        const auto& ax = info.adhesion(x);
        bool in = (shape.in_subtree(x, o) || std::binary_search(ax.begin(), ax.end(), v)) && !shape.in_subtree(y, o);
        if (in) keep.push_back(v);
    }
    BiInterfaceGraph h;
    h.arity = c.arity;
    std::vector<int> id(g.vertex_count(), -1);
    for (Vertex v : keep) {
        int l = -1, r = -1;
        for (std::size_t i = 0; i < b.adhesion_size(x); ++i)
            if (b.adh_verts[b.adh_off[x] + i] == v) l = c.color[b.adh_off[x] + i];
        for (std::size_t i = 0; i < b.adhesion_size(y); ++i)
            if (b.adh_verts[b.adh_off[y] + i] == v) r = c.color[b.adh_off[y] + i];
        id[v] = h.add_vertex(l, r);
    }
    for (Vertex v : keep)
        for (Vertex w : g.neighbors(v))
            if (v < w && id[w] >= 0) h.add_edge(id[v], id[w]);
    return abstract(h);
}

}  // namespace

TEST(AdhesionColoring, ParentChildConsistency) {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 100; ++it) {
        auto p = prepared(rng);
        auto b = build_bag_graphs(p.g, p.d);
        auto c = compute_adhesion_colorings(b, p.q);
        EXPECT_EQ(b.adhesion_size(p.d.root), 0u);
        for (NodeId y = 0; y < b.node_count(); ++y) {
            std::set<int> cols;
            for (std::size_t i = 0; i < b.adhesion_size(y); ++i) {
                int col = c.color[b.adh_off[y] + i];
                EXPECT_LT(col, 2 * p.q);
                EXPECT_TRUE(cols.insert(col).second);
            }
            NodeId x = b.parent[y];
            if (x == kNoNode) continue;
            for (std::size_t i = 0; i < b.adhesion_size(x); ++i)
                for (std::size_t j = 0; j < b.adhesion_size(y); ++j) {
                    bool same_vertex = b.adh_verts[b.adh_off[x] + i] == b.adh_verts[b.adh_off[y] + j];
                    bool same_color = c.color[b.adh_off[x] + i] == c.color[b.adh_off[y] + j];
                    EXPECT_EQ(same_vertex, same_color);
                }
        }
    }
}

TEST(AdhesionColoring, ChainKeepsColor) {
    // bags {0,1} {1,2} {1,3} {1,4} as a chain: vertex 1 is in every adhesion
    Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {1, 3}, {1, 4}});
    TreeDecomposition d{{kNoNode, 0, 1, 2}, {{0, 1}, {1, 2}, {1, 3}, {1, 4}}, 0};
    auto b = build_bag_graphs(g, d);
    auto c = compute_adhesion_colorings(b, 1);
    for (NodeId y = 1; y < 4; ++y) EXPECT_EQ(c.color[b.adh_off[y]], 0);
    EXPECT_THROW(compute_adhesion_colorings(b, 0), AdhesionTooLarge);
}

TEST(AdhesionColoring, FreshVerticesTakeLowestFreeColors) {
    // root {0,1,2}; child {1,2,3}; grandchild {2,3,4}: adh(child)={1,2} gets 0,1;
    // adh(grandchild)={2,3}: 2 inherits 1, 3 takes the lowest color not used by adh(child), i.e. 2
    Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}});
    TreeDecomposition d{{kNoNode, 0, 1}, {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}}, 0};
    auto b = build_bag_graphs(g, d);
    auto c = compute_adhesion_colorings(b, 2);
    EXPECT_EQ(c.color[b.adh_off[1]], 0);
    EXPECT_EQ(c.color[b.adh_off[1] + 1], 1);
    EXPECT_EQ(c.color[b.adh_off[2]], 1);
    EXPECT_EQ(c.color[b.adh_off[2] + 1], 2);
}

TEST(EdgeLabel, EqualsAbstractionOfContextGraph) {
    std::mt19937_64 rng(22);
    for (int it = 0; it < 120; ++it) {
        auto p = prepared(rng, 25);
        auto b = build_bag_graphs(p.g, p.d);
        auto c = compute_adhesion_colorings(b, p.q);
        for (NodeId y = 0; y < b.node_count(); ++y) {
            if (b.parent[y] == kNoNode) continue;
            ASSERT_EQ(edge_label(b, c, y), context_abstraction(p.g, p.d, b, c, b.parent[y], y));
        }
    }
}

TEST(EdgeLabel, PathMultiplicativity) {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 60; ++it) {
        auto p = prepared(rng, 25);
        auto b = build_bag_graphs(p.g, p.d);
        auto c = compute_adhesion_colorings(b, p.q);
        NavIndex nav(p.d.parent);
        for (auto [x, y] : ancestor_pairs(nav)) {
            std::vector<NodeId> path;
            for (NodeId w = y; w != x; w = nav.parent(w)) path.push_back(w);
            BasicGraph acc = edge_label(b, c, path.back());
            for (std::size_t i = path.size() - 1; i-- > 0;) acc = compose_basic(acc, edge_label(b, c, path[i]));
            ASSERT_EQ(acc, context_abstraction(p.g, p.d, b, c, x, y));
        }
    }
}

TEST(TorsoIndex, BackendsAgreeWithNaiveTorso) {
    std::mt19937_64 rng(24);
    std::size_t pairs = 0;
    for (int it = 0; it < 80; ++it) {
        auto p = prepared(rng, 60);
        auto b = build_bag_graphs(p.g, p.d);
        NavIndex nav(p.d.parent);
        TorsoIndex triv(b, nav, p.q, TorsoBackend::Trivial);
        TorsoIndex semi(b, nav, p.q, TorsoBackend::Semigroup);
        for (auto [x, y] : ancestor_pairs(nav)) {
            auto want = naive_torso(p.g, p.d, x, y);
            ASSERT_EQ(triv.torso(x, y), want);
            ASSERT_EQ(semi.torso(x, y), want);
            std::vector<std::pair<Vertex, Vertex>> es;
            semi.for_each_edge(x, y, [&](Vertex u, Vertex v) { es.emplace_back(std::min(u, v), std::max(u, v)); });
            std::sort(es.begin(), es.end());
            ASSERT_EQ(es, want.edges);
            ++pairs;
        }
    }
    EXPECT_GT(pairs, 500u);
}

TEST(TorsoIndex, Basics) {
    Graph g = testutil::path_graph(4);
    auto d1 = build_trivial(g);
    auto b1 = build_bag_graphs(g, d1);
    NavIndex nav1(d1.parent);
    TorsoIndex t1(b1, nav1, 1, TorsoBackend::Semigroup);
    EXPECT_EQ(t1.pair_count(), 0u);
    EXPECT_THROW(t1.torso(0, 0), NotStrictAncestor);

    TreeDecomposition d{{kNoNode, 0, 1}, {{0, 1}, {1, 2}, {2, 3}}, 0};
    auto b = build_bag_graphs(g, d);
    NavIndex nav(d.parent);
    TorsoIndex t(b, nav, 1, TorsoBackend::Trivial);
    EXPECT_EQ(t.pair_count(), 3u);
    auto tg = t.torso(0, 2);
    EXPECT_EQ(tg.vertices, (std::vector<Vertex>{2}));
    EXPECT_TRUE(tg.edges.empty());
    EXPECT_THROW(t.torso(2, 0), NotStrictAncestor);
    auto t01 = naive_torso(g, d, 0, 1);
    EXPECT_EQ(t01.vertices, (std::vector<Vertex>{1}));
}

TEST(BasicGraphs, AritySemigroupOneHasSixElements) {
    // brute force: every name subset of {(0,L),(0,R),(0,S)} meeting the basic
    // conditions, with every edge set
    std::set<std::string> all;
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<std::uint16_t> names;
        for (int s = 0; s < 3; ++s)
            if (mask >> s & 1) names.push_back(BasicGraph::name(0, static_cast<Side>(s)));
        bool has_s = mask & 4;
        if (has_s && (mask & 3)) continue;  // left/right injective
        int m = static_cast<int>(names.size());
        int pairs = m * (m - 1) / 2;
        for (int e = 0; e < (1 << pairs); ++e) {
            BasicGraph g;
            g.arity = 1;
            g.names = names;
            g.adj.assign(m, 0);
            if (e) g.adj[0] |= 2, g.adj[1] |= 1;
            all.insert(g.encode());
        }
    }
    EXPECT_EQ(all.size(), 6u);
    std::mt19937_64 rng(25);
    std::vector<BasicGraph> gens;
    for (auto& s : all) gens.push_back(BasicGraph::decode(s));
    auto t = close_generators<BasicGraph, BasicGraphHash>(gens, compose_basic);
    EXPECT_EQ(t.size() - 1, 6u);
    for (std::uint32_t a = 1; a < t.size(); ++a)
        for (std::uint32_t b2 = 1; b2 < t.size(); ++b2)
            for (std::uint32_t c = 1; c < t.size(); ++c)
                EXPECT_EQ(t.product(t.product(a, b2), c), t.product(a, t.product(b2, c)));
}
