#include <gtest/gtest.h>

#include <random>

#include "cutl/builders.hpp"
#include "cutl/generators.hpp"
#include "cutl/oracle.hpp"
#include "test_util.hpp"

using namespace cutl;

namespace {

// All subsets of [0, n) with at most k elements.
std::vector<std::vector<Vertex>> small_subsets(int n, int k) {
    std::vector<std::vector<Vertex>> out{{}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (static_cast<int>(out[i].size()) == k) continue;
        Vertex from = out[i].empty() ? 0 : out[i].back() + 1;
        for (Vertex v = from; v < n; ++v) {
            auto next = out[i];
            next.push_back(v);
            out.push_back(next);
        }
    }
    return out;
}

// Reachability inside `allowed` minus S, from the definition.
bool reach(const Graph& g, Vertex a, Vertex b, const std::vector<char>& allowed, const std::vector<Vertex>& S) {
    std::vector<char> ok = allowed;
    for (Vertex u : S) ok[u] = 0;
    if (!ok[a] || !ok[b]) return false;
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<Vertex> st{a};
    seen[a] = 1;
    while (!st.empty()) {
        Vertex v = st.back();
        st.pop_back();
        if (v == b) return true;
        for (Vertex w : g.neighbors(v))
            if (ok[w] && !seen[w]) seen[w] = 1, st.push_back(w);
    }
    return false;
}

void exhaustive(const Graph& g, const TreeDecomposition& d, int k, Mode mode, TorsoBackend backend,
                bool check_profiles) {
    auto o = build_oracle(g, d, k, mode, backend);
    const auto& dd = o->decomposition();
    DecompositionInfo info(dd, g.vertex_count());
    const int n = g.vertex_count();
    QueryContext ctx(*o);
    std::vector<char> all(n, 1);
    const std::vector<Vertex>* cur_S = nullptr;
    if (check_profiles)
        ctx.trace = [&](const Profile& p) {
            std::vector<char> cone(n, 0);
            for (Vertex v : info.cone(p.node)) cone[v] = 1;
            for (std::size_t i = 0; i < p.dom.size(); ++i)
                for (std::size_t j = i + 1; j < p.dom.size(); ++j) {
                    bool in = p.has(p.dom[i], p.dom[j]);
                    bool local = reach(g, p.dom[i], p.dom[j], cone, *cur_S);
                    bool global = reach(g, p.dom[i], p.dom[j], all, *cur_S);
                    if (mode == Mode::Strong) {
                        ASSERT_EQ(in, local) << "node " << p.node;
                    } else {
                        if (local) {
                            ASSERT_TRUE(in) << "node " << p.node;
                        }
                        if (in) {
                            ASSERT_TRUE(global) << "node " << p.node;
                        }
                    }
                }
        };
    for (const auto& S : small_subsets(n, k)) {
        cur_S = &S;
        VertexSet forb(n, S);
        for (Vertex s = 0; s < n; ++s)
            for (Vertex t = 0; t < n; ++t) {
                bool want = connected_avoiding(g, s, t, forb);
                bool got = o->query(ctx, s, t, S);
                ASSERT_EQ(got, want) << "s=" << s << " t=" << t << " |S|=" << S.size();
                ASSERT_LE(ctx.stats.x_size, k + 3);
                ASSERT_LE(ctx.stats.y_size, 2 * k + 5);
                ASSERT_LE(ctx.stats.max_pairs, static_cast<std::size_t>((o->q() + 2) * (o->q() + 1) / 2));
                ASSERT_EQ(ctx.stats.unbounded_ops, 0u);
            }
    }
}

}  // namespace

TEST(Oracle, SpecialCases) {
    Graph g = testutil::path_graph(5);
    auto o = build_oracle(g, build_trivial(g), 2, Mode::Strong, TorsoBackend::Semigroup);
    EXPECT_TRUE(o->query(2, 2, std::vector<Vertex>{}));
    EXPECT_FALSE(o->query(2, 2, std::vector<Vertex>{2}));
    EXPECT_FALSE(o->query(0, 4, std::vector<Vertex>{0}));
    EXPECT_FALSE(o->query(0, 4, std::vector<Vertex>{2}));
    EXPECT_TRUE(o->query(0, 4, std::vector<Vertex>{}));
    EXPECT_THROW(o->query(0, 4, std::vector<Vertex>{1, 2, 3}), FailureBudget);
    EXPECT_NO_THROW(o->query(0, 4, std::vector<Vertex>{1, 1, 2}));
    EXPECT_THROW(o->query(0, 9, std::vector<Vertex>{}), InvalidArgument);
}

TEST(Oracle, RandomDecompositionsExhaustiveStrong) {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 60; ++it) {
        int n = 1 + static_cast<int>(rng() % 10);
        auto inst = testutil::random_decomposed(n, 1 + static_cast<int>(rng() % 8), 0.5, rng);
        int k = static_cast<int>(rng() % 3);
        exhaustive(inst.g, inst.d, k, Mode::Strong, it % 2 ? TorsoBackend::Semigroup : TorsoBackend::Trivial, true);
    }
}

TEST(Oracle, RandomDecompositionsExhaustiveWeak) {
    std::mt19937_64 rng(32);
    for (int it = 0; it < 60; ++it) {
        int n = 1 + static_cast<int>(rng() % 10);
        auto inst = testutil::random_decomposed(n, 1 + static_cast<int>(rng() % 8), 0.5, rng);
        int k = static_cast<int>(rng() % 3);
        exhaustive(inst.g, inst.d, k, Mode::Weak, TorsoBackend::Trivial, true);
    }
}

TEST(Oracle, DegreeShortcutDoesNotChangeAnswers) {
    std::mt19937_64 rng(34);
    for (int it = 0; it < 40; ++it) {
        int n = 4 + static_cast<int>(rng() % 10);
        auto inst = testutil::random_decomposed(n, 1 + static_cast<int>(rng() % 4), 0.7, rng);
        int k = 1 + static_cast<int>(rng() % 2);
        Mode mode = it % 2 ? Mode::Weak : Mode::Strong;
        OracleOptions off;
        off.degree_shortcut = false;
        auto a = build_oracle(inst.g, inst.d, k, mode, TorsoBackend::Trivial);
        auto b = build_oracle(inst.g, inst.d, k, mode, TorsoBackend::Trivial, off);
        for (const auto& S : small_subsets(n, k))
            for (Vertex s = 0; s < n; ++s)
                for (Vertex t = 0; t < n; ++t) ASSERT_EQ(a->query(s, t, S), b->query(s, t, S));
    }
}

TEST(Oracle, GeneratedFamilies) {
    Rng rng(33);
    for (int it = 0; it < 8; ++it) {
        auto ch = gen_chordal(12, 4, 0.5, rng);
        exhaustive(ch.graph, build_clique_tree(ch.graph), 2, Mode::Strong, TorsoBackend::Semigroup, true);
        Graph t = gen_tree(12, rng);
        exhaustive(t, build_clique_tree(t), 2, Mode::Strong, TorsoBackend::Semigroup, false);
    }
    Graph tc = gen_two_cliques(10);
    exhaustive(tc, build_clique_tree(tc), 2, Mode::Strong, TorsoBackend::Semigroup, true);
}

TEST(Oracle, PathDecompositionOfLongPath) {
    const int n = 100;
    Graph g = testutil::path_graph(n);
    TreeDecomposition d;
    for (int i = 0; i + 1 < n; ++i) {
        d.parent.push_back(i == 0 ? kNoNode : i - 1);
        d.bags.push_back({i, i + 1});
    }
    d.root = 0;
    auto o = build_oracle(g, d, 1, Mode::Strong, TorsoBackend::Trivial);
    EXPECT_EQ(o->decomposition().node_count(), 99);
    EXPECT_EQ(o->torso_index().pair_count(), 99u * 98u / 2u);
    EXPECT_EQ(o->q(), 1);
    QueryContext ctx(*o);
    for (Vertex s = 0; s < n; s += 7)
        for (Vertex t = 0; t < n; t += 5)
            for (Vertex u = 0; u < n; u += 3) {
                bool want = s == t ? s != u : !(std::min(s, t) <= u && u <= std::max(s, t));
                ASSERT_EQ(o->query(ctx, s, t, std::vector<Vertex>{u}), want);
            }
}

TEST(Oracle, DeclaredAndRejectedQ) {
    // an 8-cycle in one bag is not (2,2)-unbreakable
    std::vector<Edge> es;
    for (int i = 0; i < 8; ++i) es.emplace_back(i, (i + 1) % 8);
    Graph c8 = Graph::from_edges(8, es);
    OracleOptions opt;
    opt.q = 2;
    EXPECT_THROW(build_oracle(c8, build_trivial(c8), 2, Mode::Strong, TorsoBackend::Trivial, opt), CertificationFailed);
    opt.certify = false;
    auto o = build_oracle(c8, build_trivial(c8), 2, Mode::Strong, TorsoBackend::Trivial, opt);
    EXPECT_FALSE(o->certified());
    EXPECT_FALSE(o->certification_ran());
    auto m = build_oracle(c8, build_trivial(c8), 2, Mode::Strong, TorsoBackend::Trivial);
    EXPECT_TRUE(m->certified());
    EXPECT_EQ(m->q(), 5);  // two opposite cut vertices leave 5 on each side
}

TEST(Oracle, BatchWithThreadsMatchesSequential) {
    Rng rng(34);
    auto ch = gen_chordal(300, 4, 0.5, rng);
    auto o = build_oracle(ch.graph, build_clique_tree(ch.graph), 2, Mode::Strong, TorsoBackend::Semigroup);
    std::vector<ConnectivityOracle::Query> qs;
    for (int i = 0; i < 2000; ++i) {
        ConnectivityOracle::Query q{static_cast<Vertex>(uniform_below(rng, 300)), static_cast<Vertex>(uniform_below(rng, 300)), {}};
        for (int j = 0; j < 2; ++j) q.S.push_back(static_cast<Vertex>(uniform_below(rng, 300)));
        qs.push_back(q);
    }
    auto a = o->query_batch(qs, 1);
    auto b = o->query_batch(qs, 4);
    EXPECT_EQ(a, b);
    for (std::size_t i = 0; i < qs.size(); ++i)
        ASSERT_EQ(a[i] != 0, connected_avoiding(ch.graph, qs[i].s, qs[i].t, VertexSet(300, qs[i].S)));
}
