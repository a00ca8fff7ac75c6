#include <gtest/gtest.h>

#include <array>

#include "cutl/bi_interface.hpp"
#include "cutl/generators.hpp"
#include "cutl/path_product.hpp"

using namespace cutl;

namespace {

std::vector<NodeId> random_tree(int n, Rng& rng, bool deep) {
    std::vector<NodeId> p(n, kNoNode);
    for (int x = 1; x < n; ++x)
        p[x] = deep ? x - 1 - static_cast<NodeId>(uniform_below(rng, std::min(x, 3)))
                    : static_cast<NodeId>(uniform_below(rng, x));
    return p;
}

std::vector<NodeId> preorder(const NavIndex& nav) {
    std::vector<NodeId> o(nav.size());
    for (int i = 0; i < nav.size(); ++i) o[i] = i;
    std::sort(o.begin(), o.end(), [&](NodeId a, NodeId b) { return nav.order_key(a) < nav.order_key(b); });
    return o;
}

}  // namespace

TEST(FunctionalIndex, RandomFunctionsMatchNaiveComposition) {
    Rng rng(5);
    for (int it = 0; it < 40; ++it) {
        int n = 1 + static_cast<int>(uniform_below(rng, 60));
        std::uint32_t s = 1 + static_cast<std::uint32_t>(uniform_below(rng, 9));
        auto p = random_tree(n, rng, it % 2);
        NavIndex nav(p);
        int nf = 1 + static_cast<int>(uniform_below(rng, 4));
        std::vector<std::vector<std::uint32_t>> fns(nf, std::vector<std::uint32_t>(s));
        for (auto& f : fns)
            for (auto& y : f) y = static_cast<std::uint32_t>(uniform_below(rng, s));
        std::vector<std::uint32_t> fn_of(n, kNoFunction);
        for (int w = 1; w < n; ++w) fn_of[w] = static_cast<std::uint32_t>(uniform_below(rng, nf));
        FunctionalIndex idx(nav, preorder(nav), s, fn_of, fns);
        // coloring invariant
        for (int w = 1; w < n; ++w)
            for (std::uint32_t x = 0; x < s; ++x)
                ASSERT_LE(idx.color(w, fns[fn_of[w]][x]), idx.color(p[w], x));
        for (NodeId w = 0; w < n; ++w) {
            std::vector<NodeId> path;
            for (NodeId y = w; y != kNoNode; y = p[y]) path.push_back(y);
            for (std::size_t a = 0; a < path.size(); ++a) {
                NodeId v = path[a];
                for (std::uint32_t x = 0; x < s; ++x) {
                    std::uint32_t expect = x;
                    for (std::size_t b = a; b-- > 0;) expect = fns[fn_of[path[b]]][expect];
                    int depth = 0;
                    ASSERT_EQ(idx.query(v, w, x, &depth), expect);
                    ASSERT_LE(static_cast<std::uint32_t>(depth), s);
                }
            }
        }
    }
}

TEST(FunctionalIndex, RejectsNonAncestor) {
    NavIndex nav({kNoNode, 0, 0});
    FunctionalIndex idx(nav, {0, 1, 2}, 2, {kNoFunction, 0, 0}, {{1, 0}});
    EXPECT_THROW(idx.query(1, 2, 0), NotAncestor);
}

TEST(PathIndex, CyclicGroupPaths) {
    Rng rng(6);
    auto table = close_generators<int>({1, 2, 5}, [](const int& a, const int& b) { return (a + b) % 7; });
    int n = 300;
    auto p = random_tree(n, rng, true);
    NavIndex nav(p);
    std::vector<std::uint32_t> labels(n, 0);
    for (int w = 1; w < n; ++w) labels[w] = table.generators()[uniform_below(rng, 3)];
    PathIndex<int, std::hash<int>> idx(table, nav, preorder(nav), labels);
    for (NodeId y = 0; y < n; ++y)
        for (NodeId x = y; x != kNoNode; x = p[x]) {
            int depth = 0;
            ASSERT_EQ(idx.path_product(x, y, &depth), naive_path_product(table, nav, labels, x, y));
            ASSERT_LE(static_cast<std::size_t>(depth), table.size());
        }
}

TEST(PathIndex, TransformationMonoid) {
    using Map3 = std::array<std::uint8_t, 3>;
    struct H {
        std::size_t operator()(const Map3& m) const { return m[0] * 9 + m[1] * 3 + m[2]; }
    };
    auto then = [](const Map3& f, const Map3& g) { return Map3{g[f[0]], g[f[1]], g[f[2]]}; };
    auto table = close_generators<Map3, H>({{1, 2, 0}, {1, 0, 2}, {0, 0, 2}}, then);
    Rng rng(7);
    int n = 400;
    auto p = random_tree(n, rng, false);
    NavIndex nav(p);
    std::vector<std::uint32_t> labels(n, 0);
    for (int w = 1; w < n; ++w) labels[w] = table.generators()[uniform_below(rng, 3)];
    PathIndex<Map3, H> idx(table, nav, preorder(nav), labels);
    for (NodeId y = 0; y < n; ++y)
        for (NodeId x = y; x != kNoNode; x = p[x]) ASSERT_EQ(idx.path_product(x, y), naive_path_product(table, nav, labels, x, y));
}
