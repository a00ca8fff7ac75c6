#include <gtest/gtest.h>

#include <sstream>

#include "cutl/builders.hpp"
#include "cutl/generators.hpp"
#include "cutl/image.hpp"

using namespace cutl;

namespace {

std::string saved(const ConnectivityOracle& o) {
    std::ostringstream out;
    save_image(out, o);
    return out.str();
}

void same_answers(const ConnectivityOracle& a, const ConnectivityOracle& b, Rng& rng) {
    const int n = a.graph().vertex_count();
    for (int i = 0; i < 3000; ++i) {
        Vertex s = static_cast<Vertex>(uniform_below(rng, n)), t = static_cast<Vertex>(uniform_below(rng, n));
        std::vector<Vertex> S;
        for (int j = 0; j < a.k(); ++j) S.push_back(static_cast<Vertex>(uniform_below(rng, n)));
        ASSERT_EQ(a.query(s, t, S), b.query(s, t, S));
    }
}

}  // namespace

TEST(Image, RoundTripBothBackends) {
    Rng rng(41);
    auto ch = gen_chordal(400, 4, 0.5, rng);
    auto d = build_clique_tree(ch.graph);
    for (auto backend : {TorsoBackend::Trivial, TorsoBackend::Semigroup}) {
        auto o = build_oracle(ch.graph, d, 2, Mode::Strong, backend);
        std::string img = saved(*o);
        std::istringstream in(img);
        auto back = load_image(in);
        EXPECT_EQ(back->q(), o->q());
        EXPECT_EQ(back->k(), o->k());
        EXPECT_EQ(back->decomposition(), o->decomposition());
        EXPECT_EQ(back->torso_index().backend(), backend);
        EXPECT_EQ(saved(*back), img);
        same_answers(*o, *back, rng);
    }
}

TEST(Image, Rejections) {
    Rng rng(42);
    Graph g = gen_tree(50, rng);
    auto o = build_oracle(g, build_clique_tree(g), 1, Mode::Weak, TorsoBackend::Trivial);
    std::string img = saved(*o);
    auto load = [](std::string s) {
        std::istringstream in(s);
        return load_image(in);
    };
    EXPECT_NO_THROW(load(img));
    EXPECT_EQ(load(img)->mode(), Mode::Weak);
    std::string bad = img;
    bad[0] = 'X';
    EXPECT_THROW(load(bad), ImageError);
    bad = img;
    bad[6] = 2;  // version
    EXPECT_THROW(load(bad), ImageError);
    bad = img;
    bad[img.size() / 2] ^= 0x40;
    EXPECT_THROW(load(bad), ImageError);
    EXPECT_THROW(load(img.substr(0, img.size() - 3)), ImageError);
    EXPECT_THROW(load(""), ImageError);
}
