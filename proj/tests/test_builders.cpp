#include <gtest/gtest.h>

#include "cutl/builders.hpp"
#include "cutl/generators.hpp"
#include "test_util.hpp"

using namespace cutl;

namespace {

bool all_bags_cliques(const Graph& g, const TreeDecomposition& d) {
    for (const auto& b : d.bags)
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j)
                if (!g.adjacent(b[i], b[j])) return false;
    return true;
}

// Number of maximal cliques by brute force over vertex subsets.
int count_maximal_cliques(const Graph& g) {
    int n = g.vertex_count(), count = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        bool clique = true;
        for (int i = 0; i < n && clique; ++i)
            for (int j = i + 1; j < n && clique; ++j)
                if ((mask >> i & 1) && (mask >> j & 1) && !g.adjacent(i, j)) clique = false;
        if (!clique) continue;
        bool maximal = true;
        for (int v = 0; v < n && maximal; ++v) {
            if (mask >> v & 1) continue;
            bool all = true;
            for (int i = 0; i < n && all; ++i)
                if ((mask >> i & 1) && !g.adjacent(i, v)) all = false;
            if (all) maximal = false;
        }
        count += maximal;
    }
    return count;
}

}  // namespace

TEST(Builders, TrivialIsValid) {
    Rng rng(4);
    Graph g = gen_er(15, 0.3, rng);
    auto d = build_trivial(g);
    EXPECT_TRUE(validate(g, d).empty());
    EXPECT_EQ(d.node_count(), 1);
}

TEST(Builders, CliqueTreeOnChordalGraphs) {
    Rng rng(8);
    for (int it = 0; it < 100; ++it) {
        int n = 1 + static_cast<int>(uniform_below(rng, 14));
        auto gen = gen_chordal(n, 2 + it % 4, 0.6, rng);
        auto d = build_clique_tree(gen.graph);
        ASSERT_TRUE(validate(gen.graph, d).empty()) << it;
        EXPECT_TRUE(all_bags_cliques(gen.graph, d));
        EXPECT_EQ(d.node_count(), count_maximal_cliques(gen.graph)) << it;
        EXPECT_TRUE(validate(gen.graph, gen.decomposition).empty());
    }
}

TEST(Builders, CliqueTreeOnForestsAndDisconnected) {
    Rng rng(10);
    Graph t = gen_tree(30, rng);
    auto d = build_clique_tree(t);
    EXPECT_TRUE(validate(t, d).empty());
    EXPECT_EQ(d.node_count(), 29);
    Graph two = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {3, 4}});
    EXPECT_TRUE(validate(two, build_clique_tree(two)).empty());
}

TEST(Builders, NotChordalThrows) {
    std::vector<Edge> c4{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    EXPECT_THROW(build_clique_tree(Graph::from_edges(4, c4)), NotChordal);
}

TEST(Builders, HeuristicOnTwoCliques) {
    // two K5 joined by one edge
    Graph g = gen_two_cliques(10);
    auto res = build_heuristic(g, 1, 6);
    ASSERT_TRUE(res.ok) << res.reason;
    EXPECT_EQ(res.decomposition.node_count(), 2);
    EXPECT_LE(adhesion_width(res.decomposition), 2u);
    EXPECT_TRUE(certify(g, res.decomposition, res.q, 1, Mode::Strong).ok);
}

TEST(Builders, HeuristicOnCompleteGraph) {
    Graph g = gen_two_cliques(2);
    std::vector<Edge> es;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) es.emplace_back(i, j);
    Graph k6 = Graph::from_edges(6, es);
    auto res = build_heuristic(k6, 2, 6);
    ASSERT_TRUE(res.ok);
    EXPECT_EQ(res.decomposition.node_count(), 1);
}

TEST(Builders, HeuristicCertifiesOnRandomGraphs) {
    Rng rng(12);
    int ok = 0;
    for (int it = 0; it < 30; ++it) {
        Graph g = gen_er(30, 0.1, rng);
        auto res = build_heuristic(g, 2, 30);
        if (!res.ok) continue;
        ++ok;
        EXPECT_TRUE(validate(g, res.decomposition).empty());
        EXPECT_TRUE(is_regular(g, res.decomposition));
        EXPECT_TRUE(certify(g, res.decomposition, res.q, 2, Mode::Strong).ok);
    }
    EXPECT_GT(ok, 0);
}

TEST(Builders, McsOrderIsPeoOnChordal) {
    Rng rng(14);
    auto gen = gen_chordal(40, 4, 0.5, rng);
    EXPECT_TRUE(is_perfect_elimination(gen.graph, mcs_order(gen.graph)));
}
