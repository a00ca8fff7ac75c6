#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "tree_decomposition.hpp"

namespace cutl {

using Rng = std::mt19937_64;

// Uniform integer in [0, n), identical on every platform.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) throw InvalidArgument("empty range");
    const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
    std::uint64_t x;
    do x = rng();
    while (x > limit);
    return x % n;
}

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool coin(Rng& rng, double p) { return uniform_unit(rng) < p; }

enum class Family { Er, Tree, Chordal, TwoCliques };

inline Family parse_family(const std::string& s) {
    if (s == "er") return Family::Er;
    if (s == "tree") return Family::Tree;
    if (s == "chordal") return Family::Chordal;
    if (s == "two-cliques") return Family::TwoCliques;
    throw InvalidArgument("unknown family '" + s + "'");
}

inline const char* to_string(Family f) {
    switch (f) {
        case Family::Er: return "er";
        case Family::Tree: return "tree";
        case Family::Chordal: return "chordal";
        case Family::TwoCliques: return "two-cliques";
    }
    return "?";
}

struct Generated {
    Graph graph;
    bool has_decomposition = false;
    TreeDecomposition decomposition;
};

inline Graph gen_er(int n, double p, Rng& rng) {
    std::vector<Edge> es;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (coin(rng, p)) es.emplace_back(u, v);
    return Graph::from_edges(n, es);
}

inline Graph gen_tree(int n, Rng& rng) {
    std::vector<Edge> es;
    for (Vertex v = 1; v < n; ++v) es.emplace_back(static_cast<Vertex>(uniform_below(rng, v)), v);
    return Graph::from_edges(n, es);
}

inline Graph gen_two_cliques(int n) {
    const int a = n / 2;
    std::vector<Edge> es;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if ((u < a) == (v < a)) es.emplace_back(u, v);
    if (a > 0 && a < n) es.emplace_back(a - 1, a);
    return Graph::from_edges(n, es);
}

// Chordal graph grown by attaching each new vertex to part of an existing clique.
// Cliques have at most `width` vertices; `density` in [0,1] biases toward larger
// attachments. The returned decomposition has one bag per grown clique.
inline Generated gen_chordal(int n, int width, double density, Rng& rng) {
    if (width < 1) throw InvalidArgument("chordal width must be positive");
    Generated out;
    std::vector<Edge> es;
    auto& d = out.decomposition;
    out.has_decomposition = true;
    if (n == 0) {
        out.graph = Graph::from_edges(0, es);
        d.parent = {kNoNode};
        d.bags = {{}};
        d.root = 0;
        return out;
    }
    d.parent.push_back(kNoNode);
    d.bags.push_back({0});
    d.root = 0;
    for (Vertex v = 1; v < n; ++v) {
        NodeId host = static_cast<NodeId>(uniform_below(rng, d.bags.size()));
        const auto& clique = d.bags[host];
        std::vector<Vertex> pool = clique;
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[uniform_below(rng, i)]);
        std::size_t cap = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(width - 1));
        std::size_t take = cap == 0 ? 0 : 1;
        while (take < cap && coin(rng, density)) ++take;
        std::vector<Vertex> bag(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
        for (Vertex u : bag) es.emplace_back(u, v);
        bag.push_back(v);
        std::sort(bag.begin(), bag.end());
        d.bags.push_back(std::move(bag));
        d.parent.push_back(host);
    }
    out.graph = Graph::from_edges(n, es);
    return out;
}

inline Generated generate(Family f, int n, double density, Rng& rng, int chordal_width = 4) {
    Generated out;
    switch (f) {
        case Family::Er: out.graph = gen_er(n, density, rng); break;
        case Family::Tree: out.graph = gen_tree(n, rng); break;
        case Family::TwoCliques: out.graph = gen_two_cliques(n); break;
        case Family::Chordal: return gen_chordal(n, chordal_width, density, rng);
    }
    return out;
}

}  // namespace cutl
