#include <gtest/gtest.h>

#include <random>

#include "cutl/generators.hpp"
#include "cutl/rmq.hpp"
#include "cutl/tree_nav.hpp"

using namespace cutl;

namespace {

std::vector<NodeId> random_parent(int n, Rng& rng, int shape) {
    std::vector<NodeId> p(n, kNoNode);
    // shape 0: uniform recursive, 1: path-like, 2: star-like
    for (int x = 1; x < n; ++x) {
        if (shape == 0) p[x] = static_cast<NodeId>(uniform_below(rng, x));
        else if (shape == 1) p[x] = x - 1 - static_cast<NodeId>(uniform_below(rng, std::min(x, 2)));
        else p[x] = static_cast<NodeId>(uniform_below(rng, std::min(x, 3)));
    }
    // shuffle labels so the root is not always 0
    std::vector<NodeId> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
    std::vector<NodeId> q(n, kNoNode);
    for (int x = 0; x < n; ++x) q[perm[x]] = p[x] == kNoNode ? kNoNode : perm[p[x]];
    return q;
}

std::vector<NodeId> ancestors(const std::vector<NodeId>& p, NodeId x) {
    std::vector<NodeId> a;
    for (; x != kNoNode; x = p[x]) a.push_back(x);
    return a;  // x first, root last
}

NodeId naive_lca(const std::vector<NodeId>& p, NodeId x, NodeId y) {
    auto ax = ancestors(p, x);
    for (NodeId z : ancestors(p, y))
        if (std::find(ax.begin(), ax.end(), z) != ax.end()) return z;
    return kNoNode;
}

std::vector<NodeId> preorder_of(const NavIndex& nav) {
    std::vector<NodeId> order(nav.size());
    for (int i = 0; i < nav.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return nav.order_key(a) < nav.order_key(b); });
    return order;
}

}  // namespace

TEST(LinearRmq, MatchesScan) {
    Rng rng(1);
    for (int n : {1, 2, 63, 64, 65, 130, 700}) {
        std::vector<std::int32_t> a(n);
        for (auto& v : a) v = static_cast<std::int32_t>(uniform_below(rng, 20));
        LinearRmq rmq(a);
        for (int it = 0; it < 2000; ++it) {
            std::size_t l = uniform_below(rng, n), r = uniform_below(rng, n);
            if (l > r) std::swap(l, r);
            auto m = *std::min_element(a.begin() + l, a.begin() + r + 1);
            auto i = rmq.argmin(l, r);
            ASSERT_GE(i, l);
            ASSERT_LE(i, r);
            ASSERT_EQ(a[i], m);
        }
    }
}

TEST(NavIndex, PathExample) {
    NavIndex nav({kNoNode, 0, 1, 2, 3});
    EXPECT_EQ(nav.lca(3, 4), 3);
    EXPECT_EQ(nav.dir(0, 4), 1);
    EXPECT_THROW(nav.dir(4, 0), NotStrictAncestor);
    EXPECT_THROW(nav.dir(2, 2), NotStrictAncestor);
}

TEST(NavIndex, CycleDetected) {
    EXPECT_THROW(build_nav({kNoNode, 2, 1}), CycleDetected);
    EXPECT_THROW(build_nav({1, 0}), CycleDetected);
}

TEST(NavIndex, ExhaustiveAgainstNaive) {
    Rng rng(2);
    for (int it = 0; it < 30; ++it) {
        int n = 1 + static_cast<int>(uniform_below(rng, 80));
        auto p = random_parent(n, rng, it % 3);
        NavIndex nav(p);
        for (NodeId x = 0; x < n; ++x)
            for (NodeId y = 0; y < n; ++y) {
                ASSERT_EQ(nav.lca(x, y), naive_lca(p, x, y));
                auto ay = ancestors(p, y);
                auto pos = std::find(ay.begin(), ay.end(), x);
                ASSERT_EQ(nav.is_ancestor(x, y), pos != ay.end());
                if (pos != ay.end() && pos != ay.begin()) {
                    ASSERT_EQ(nav.dir(x, y), *(pos - 1));
                }
            }
    }
}

TEST(PartitionNav, ExhaustiveAgainstNaive) {
    Rng rng(3);
    for (int it = 0; it < 30; ++it) {
        int n = 1 + static_cast<int>(uniform_below(rng, 60));
        auto p = random_parent(n, rng, it % 3);
        NavIndex nav(p);
        std::vector<NodeId> members;
        std::vector<char> in(n, 0);
        for (NodeId x = 0; x < n; ++x)
            if (uniform_below(rng, 3) == 0) members.push_back(x), in[x] = 1;
        PartitionNavIndex pn(nav, preorder_of(nav), members);
        for (NodeId y = 0; y < n; ++y) {
            auto ay = ancestors(p, y);
            NodeId expect_anc = kNoNode;
            for (std::size_t i = 1; i < ay.size(); ++i)
                if (in[ay[i]]) {
                    expect_anc = ay[i];
                    break;
                }
            ASSERT_EQ(pn.anc(y), expect_anc);
            for (NodeId x = 0; x < n; ++x) {
                auto pos = std::find(ay.begin(), ay.end(), x);
                if (pos == ay.end()) {
                    EXPECT_THROW(pn.topmost_in_set(x, y), NotAncestor);
                    continue;
                }
                // topmost = the member closest to x walking down toward y
                NodeId top = kNoNode;
                for (auto q = pos;; --q) {
                    if (in[*q]) {
                        top = *q;
                        break;
                    }
                    if (q == ay.begin()) break;
                }
                ASSERT_EQ(pn.topmost_in_set(x, y), top) << it << " " << x << " " << y;
            }
        }
    }
}

TEST(LcaClosure, SizeBoundAndClosed) {
    Rng rng(4);
    for (int it = 0; it < 200; ++it) {
        int n = 1 + static_cast<int>(uniform_below(rng, 100));
        auto p = random_parent(n, rng, it % 3);
        NavIndex nav(p);
        std::vector<NodeId> xs;
        int k = 1 + static_cast<int>(uniform_below(rng, 8));
        for (int i = 0; i < k; ++i) xs.push_back(static_cast<NodeId>(uniform_below(rng, n)));
        auto ys = lca_closure(nav, xs);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        EXPECT_LE(ys.size(), 2 * xs.size() - 1);
        for (NodeId a : ys)
            for (NodeId b : ys) EXPECT_NE(std::find(ys.begin(), ys.end(), nav.lca(a, b)), ys.end());
        auto par = closure_tree(nav, ys);
        for (std::size_t i = 0; i < ys.size(); ++i) {
            if (par[i] < 0) continue;
            EXPECT_TRUE(nav.is_ancestor(ys[par[i]], ys[i]));
        }
    }
}
