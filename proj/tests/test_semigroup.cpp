#include <gtest/gtest.h>

#include <array>

#include "cutl/bi_interface.hpp"
#include "cutl/semigroup.hpp"

using namespace cutl;

namespace {

using Map3 = std::array<std::uint8_t, 3>;
struct Map3Hash {
    std::size_t operator()(const Map3& m) const { return m[0] * 9 + m[1] * 3 + m[2]; }
};
// f;g = apply f then g
Map3 then(const Map3& f, const Map3& g) { return {g[f[0]], g[f[1]], g[f[2]]}; }

}  // namespace

TEST(Semigroup, CyclicGroupExample) {
    auto t = close_generators<int>({1}, [](const int& a, const int& b) { return (a + b) % 3; });
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t.element(1), 1);
    EXPECT_EQ(t.element(2), 2);
    EXPECT_EQ(t.element(3), 0);
}

TEST(Semigroup, IdentityGeneratorGivesTwoElements) {
    auto t = close_generators<int>({0}, [](const int& a, const int& b) { return (a + b) % 5; });
    EXPECT_EQ(t.size(), 2u);
}

TEST(Semigroup, AdjoinedIdentityIsDistinct) {
    auto t = close_generators<int>({0, 1}, [](const int& a, const int& b) { return (a + b) % 4; });
    EXPECT_EQ(t.size(), 5u);  // adjoined identity plus all of Z/4
    for (std::uint32_t a = 0; a < t.size(); ++a) {
        EXPECT_EQ(t.product(0, a), a);
        EXPECT_EQ(t.product(a, 0), a);
    }
}

TEST(Semigroup, FullTransformationMonoid) {
    std::vector<Map3> gens{{1, 2, 0}, {1, 0, 2}, {0, 0, 2}};
    auto t = close_generators<Map3, Map3Hash>(gens, then);
    EXPECT_EQ(t.size(), 28u);
    for (std::uint32_t a = 1; a < t.size(); ++a)
        for (std::uint32_t b = 1; b < t.size(); ++b)
            for (std::uint32_t c = 1; c < t.size(); ++c)
                ASSERT_EQ(t.product(t.product(a, b), c), t.product(a, t.product(b, c)));
}

TEST(Semigroup, RightMultiplicationTable) {
    std::vector<Map3> gens{{1, 2, 0}, {0, 0, 2}};
    auto t = close_generators<Map3, Map3Hash>(gens, then);
    for (std::size_t g = 0; g < t.generators().size(); ++g)
        for (std::uint32_t e = 0; e < t.size(); ++e)
            EXPECT_EQ(t.times_generator(e, g), t.product(e, t.generators()[g]));
}

TEST(Semigroup, BudgetExceeded) {
    EXPECT_THROW((close_generators<int>({1}, [](const int& a, const int& b) { return (a + b) % 100; }, 50)),
                 ClosureBudgetExceeded);
}

TEST(Semigroup, BasicGraphsOfArityTwo) {
    // single edge between left 0 and right 1, plus an isolated shared vertex
    BasicGraph a;
    a.arity = 2;
    a.names = {BasicGraph::name(0, Side::L), BasicGraph::name(1, Side::R)};
    a.adj = {2, 1};
    BasicGraph b;
    b.arity = 2;
    b.names = {BasicGraph::name(0, Side::S), BasicGraph::name(1, Side::L), BasicGraph::name(1, Side::R)};
    b.adj = {0, 4, 2};
    auto t = close_generators<BasicGraph, BasicGraphHash>({a, b}, compose_basic);
    EXPECT_LE(t.size(), 64u);
    for (std::uint32_t x = 1; x < t.size(); ++x)
        for (std::uint32_t y = 1; y < t.size(); ++y)
            for (std::uint32_t z = 1; z < t.size(); ++z)
                ASSERT_EQ(t.product(t.product(x, y), z), t.product(x, t.product(y, z)));
}
