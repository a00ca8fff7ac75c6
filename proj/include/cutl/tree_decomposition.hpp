#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"

namespace cutl {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct TreeDecomposition {
    std::vector<NodeId> parent;              // kNoNode at the root
    std::vector<std::vector<Vertex>> bags;   // each sorted, distinct
    NodeId root = kNoNode;

    int node_count() const { return static_cast<int>(parent.size()); }
    const std::vector<Vertex>& bag(NodeId x) const { return bags[x]; }

    friend bool operator==(const TreeDecomposition&, const TreeDecomposition&) = default;
};

// Children lists, preorder, depths and subtree intervals of a parent array.
struct TreeShape {
    std::vector<std::vector<NodeId>> children;
    std::vector<NodeId> preorder;
    std::vector<int> tin, tout, depth;  // tout = last preorder index inside the subtree
    NodeId root = kNoNode;

    TreeShape() = default;
    explicit TreeShape(const std::vector<NodeId>& parent) {
        const int n = static_cast<int>(parent.size());
        children.assign(n, {});
        for (NodeId x = 0; x < n; ++x) {
            if (parent[x] == kNoNode) {
                if (root != kNoNode) throw InvalidDecomposition("more than one root");
                root = x;
            } else {
                if (parent[x] < 0 || parent[x] >= n)
                    throw InvalidDecomposition("parent out of range");
                children[parent[x]].push_back(x);
            }
        }
        if (n > 0 && root == kNoNode) throw CycleDetected("no root");
        tin.assign(n, -1);
        tout.assign(n, -1);
        depth.assign(n, 0);
        preorder.reserve(n);
        if (n == 0) return;
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        tin[root] = 0;
        preorder.push_back(root);
        while (!stack.empty()) {
            auto& [x, i] = stack.back();
            if (i < children[x].size()) {
                NodeId c = children[x][i++];
                tin[c] = static_cast<int>(preorder.size());
                depth[c] = depth[x] + 1;
                preorder.push_back(c);
                stack.emplace_back(c, 0);
            } else {
                tout[x] = static_cast<int>(preorder.size()) - 1;
                stack.pop_back();
            }
        }
        if (static_cast<int>(preorder.size()) != n) throw CycleDetected("parent links contain a cycle");
    }

    int size() const { return static_cast<int>(children.size()); }
    bool in_subtree(NodeId x, NodeId y) const {  // y in subtree of x
        return tin[x] <= tin[y] && tin[y] <= tout[x];
    }
};

inline std::vector<Vertex> sorted_intersection(const std::vector<Vertex>& a,
                                               const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<Vertex> sorted_difference(const std::vector<Vertex>& a,
                                             const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Derived sets of a decomposition over a graph with n vertices.
class DecompositionInfo {
public:
    DecompositionInfo(const TreeDecomposition& d, int n) : d_(&d), shape_(d.parent), owner_(n, kNoNode) {
        const int N = d.node_count();
        adh_.resize(N);
        mrg_.resize(N);
        for (NodeId x : shape_.preorder) {
            NodeId p = d.parent[x];
            adh_[x] = p == kNoNode ? std::vector<Vertex>{} : sorted_intersection(d.bags[p], d.bags[x]);
            mrg_[x] = sorted_difference(d.bags[x], adh_[x]);
            for (Vertex v : mrg_[x]) {
                if (v < 0 || v >= n) throw InvalidDecomposition("bag vertex out of range");
                if (owner_[v] == kNoNode) owner_[v] = x;
            }
        }
    }

    const TreeDecomposition& decomposition() const { return *d_; }
    const TreeShape& shape() const { return shape_; }
    const std::vector<Vertex>& adhesion(NodeId x) const { return adh_[x]; }
    const std::vector<Vertex>& margin(NodeId x) const { return mrg_[x]; }
    // Topmost node whose bag holds v (the node whose margin contains v).
    NodeId owner(Vertex v) const { return owner_[v]; }
    const std::vector<NodeId>& owners() const { return owner_; }

    std::vector<Vertex> cone(NodeId x) const {
        std::vector<Vertex> out;
        for (int i = shape_.tin[x]; i <= shape_.tout[x]; ++i) {
            const auto& b = d_->bags[shape_.preorder[i]];
            out.insert(out.end(), b.begin(), b.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    std::vector<Vertex> component(NodeId x) const { return sorted_difference(cone(x), adh_[x]); }

    std::size_t adhesion_width() const {
        std::size_t a = 0;
        for (const auto& s : adh_) a = std::max(a, s.size());
        return a;
    }

private:
    const TreeDecomposition* d_;
    TreeShape shape_;
    std::vector<NodeId> owner_;
    std::vector<std::vector<Vertex>> adh_, mrg_;
};

inline std::size_t adhesion_width(const TreeDecomposition& d) {
    std::size_t a = 0;
    for (NodeId x = 0; x < d.node_count(); ++x)
        if (d.parent[x] != kNoNode)
            a = std::max(a, sorted_intersection(d.bags[d.parent[x]], d.bags[x]).size());
    return a;
}

inline std::size_t max_bag_size(const TreeDecomposition& d) {
    std::size_t a = 0;
    for (const auto& b : d.bags) a = std::max(a, b.size());
    return a;
}

inline void normalize_bags(TreeDecomposition& d) {
    for (auto& b : d.bags) {
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
    }
}

// ---- text format ---------------------------------------------------------

inline TreeDecomposition read_decomposition(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    long long count = -1;
    TreeDecomposition d;
    std::vector<std::uint8_t> defined;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(strip_comment(line));
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "t") {
            if (count >= 0) throw ParseError(lineno, "duplicate header");
            if (!(ss >> count) || count < 0 || count > (1LL << 30)) throw ParseError(lineno, "bad header");
            d.parent.assign(count, kNoNode);
            d.bags.assign(count, {});
            defined.assign(count, 0);
            std::string extra;
            if (ss >> extra) throw ParseError(lineno, "trailing token");
        } else if (tag == "n") {
            if (count < 0) throw ParseError(lineno, "node before header");
            long long id, par;
            if (!(ss >> id >> par)) throw ParseError(lineno, "bad node line");
            if (id < 0 || id >= count) throw ParseError(lineno, "node id out of range");
            if (par < -1 || par >= count || par == id) throw ParseError(lineno, "bad parent");
            if (defined[id]) throw ParseError(lineno, "node defined twice");
            defined[id] = 1;
            d.parent[id] = static_cast<NodeId>(par);
            std::string tok;
            while (ss >> tok) {
                long long v;
                std::size_t used = 0;
                try {
                    v = std::stoll(tok, &used);
                } catch (const std::exception&) {
                    throw ParseError(lineno, "bad bag vertex '" + tok + "'");
                }
                if (used != tok.size() || v < 0 || v > (1LL << 30))
                    throw ParseError(lineno, "bad bag vertex '" + tok + "'");
                d.bags[id].push_back(static_cast<Vertex>(v));
            }
        } else {
            throw ParseError(lineno, "unknown line tag '" + tag + "'");
        }
    }
    if (count < 0) throw ParseError(lineno, "missing header");
    for (long long i = 0; i < count; ++i)
        if (!defined[i]) throw ParseError(lineno, "node " + std::to_string(i) + " never defined");
    normalize_bags(d);
    int roots = 0;
    for (NodeId x = 0; x < count; ++x)
        if (d.parent[x] == kNoNode) d.root = x, ++roots;
    if (count > 0 && roots != 1) throw ParseError(lineno, "expected exactly one root");
    try {
        TreeShape check(d.parent);
    } catch (const Error& e) {
        throw ParseError(lineno, e.what());
    }
    return d;
}

inline TreeDecomposition parse_decomposition(const std::string& text) {
    std::istringstream in(text);
    return read_decomposition(in);
}

inline void write_decomposition(std::ostream& out, const TreeDecomposition& d) {
    out << "t " << d.node_count() << '\n';
    for (NodeId x = 0; x < d.node_count(); ++x) {
        out << "n " << x << ' ' << d.parent[x];
        for (Vertex v : d.bags[x]) out << ' ' << v;
        out << '\n';
    }
}

// ---- validity and regularity ---------------------------------------------

// Empty result means valid.
inline std::vector<std::string> validate(const Graph& g, const TreeDecomposition& d) {
    std::vector<std::string> problems;
    const int n = g.vertex_count();
    if (d.node_count() == 0) {
        if (n > 0) problems.push_back("T1: decomposition has no nodes");
        return problems;
    }
    TreeShape shape;
    try {
        shape = TreeShape(d.parent);
    } catch (const Error& e) {
        problems.push_back(std::string("tree: ") + e.what());
        return problems;
    }
    if (shape.root != d.root) problems.push_back("tree: root field disagrees with parent links");
    std::vector<int> tops(n, 0);
    std::vector<NodeId> top(n, kNoNode);
    for (NodeId x = 0; x < d.node_count(); ++x) {
        for (Vertex v : d.bags[x]) {
            if (v < 0 || v >= n) {
                problems.push_back("bag of node " + std::to_string(x) + " holds unknown vertex " +
                                   std::to_string(v));
                continue;
            }
            NodeId p = d.parent[x];
            if (p == kNoNode || !std::binary_search(d.bags[p].begin(), d.bags[p].end(), v)) {
                ++tops[v];
                top[v] = x;
            }
        }
    }
    if (!problems.empty()) return problems;
    for (Vertex v = 0; v < n; ++v) {
        if (tops[v] == 0)
            problems.push_back("T1: vertex " + std::to_string(v) + " occurs in no bag");
        else if (tops[v] > 1)
            problems.push_back("T1: occurrences of vertex " + std::to_string(v) + " are disconnected");
    }
    if (!problems.empty()) return problems;
    for (auto [u, v] : g.edges()) {
        NodeId a = top[u], b = top[v];
        bool ok = false;
        if (shape.in_subtree(a, b))
            ok = std::binary_search(d.bags[b].begin(), d.bags[b].end(), u);
        else if (shape.in_subtree(b, a))
            ok = std::binary_search(d.bags[a].begin(), d.bags[a].end(), v);
        if (!ok)
            problems.push_back("T2: edge " + std::to_string(u) + "-" + std::to_string(v) +
                               " lies in no bag");
    }
    return problems;
}

inline void require_valid(const Graph& g, const TreeDecomposition& d) {
    auto problems = validate(g, d);
    if (!problems.empty()) throw InvalidDecomposition(problems.front());
}

// Violations of the three regularity conditions; quadratic, meant for checking.
inline std::vector<std::string> regularity_violations(const Graph& g, const TreeDecomposition& d) {
    std::vector<std::string> out;
    DecompositionInfo info(d, g.vertex_count());
    for (NodeId x = 0; x < d.node_count(); ++x) {
        if (x == d.root) continue;
        const std::string tag = " at node " + std::to_string(x);
        if (info.margin(x).empty()) out.push_back("R1: empty margin" + tag);
        auto comp = info.component(x);
        if (!comp.empty()) {
            Graph h = g.induced(comp);
            if (components_avoiding(h, VertexSet(h.vertex_count())).size() != 1)
                out.push_back("R2: component is disconnected" + tag);
        }
        for (Vertex a : info.adhesion(x)) {
            bool has = false;
            for (Vertex w : g.neighbors(a))
                if (std::binary_search(comp.begin(), comp.end(), w)) {
                    has = true;
                    break;
                }
            if (!has)
                out.push_back("R3: adhesion vertex " + std::to_string(a) + " has no neighbor in component" + tag);
        }
    }
    return out;
}

inline bool is_regular(const Graph& g, const TreeDecomposition& d) {
    return regularity_violations(g, d).empty();
}

// Children sorted by smallest margin vertex, nodes renumbered in preorder.
inline TreeDecomposition canonical_order(const TreeDecomposition& d) {
    TreeDecomposition out;
    if (d.node_count() == 0) return out;
    TreeShape shape(d.parent);
    std::vector<Vertex> key(d.node_count(), 0);
    for (NodeId x = 0; x < d.node_count(); ++x) {
        NodeId p = d.parent[x];
        auto m = p == kNoNode ? d.bags[x] : sorted_difference(d.bags[x], d.bags[p]);
        key[x] = m.empty() ? std::numeric_limits<Vertex>::max() : m.front();
    }
    for (auto& ch : shape.children)
        std::stable_sort(ch.begin(), ch.end(), [&](NodeId a, NodeId b) { return key[a] < key[b]; });
    std::vector<NodeId> order, stack{shape.root};
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        order.push_back(x);
        for (auto it = shape.children[x].rbegin(); it != shape.children[x].rend(); ++it)
            stack.push_back(*it);
    }
    std::vector<NodeId> id(d.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = static_cast<NodeId>(i);
    out.parent.resize(order.size());
    out.bags.resize(order.size());
    for (NodeId x : order) {
        out.parent[id[x]] = d.parent[x] == kNoNode ? kNoNode : id[d.parent[x]];
        out.bags[id[x]] = d.bags[x];
    }
    out.root = 0;
    return out;
}

// Regular decomposition whose bags are subsets of bags of d and whose adhesion
// width does not exceed that of d. Runs a bottom-up union-find over margins:
// every node of the result is one connected component of G[comp(x)] for the
// topmost old node x that meets it.
inline TreeDecomposition regularize(const Graph& g, const TreeDecomposition& d) {
    require_valid(g, d);
    const int n = g.vertex_count();
    DecompositionInfo info(d, n);
    const TreeShape& shape = info.shape();

    std::vector<Vertex> dsu(n);
    std::iota(dsu.begin(), dsu.end(), 0);
    std::vector<std::vector<Vertex>> boundary(n);
    std::vector<std::vector<int>> open(n);
    auto find = [&](Vertex v) {
        while (dsu[v] != v) v = dsu[v] = dsu[dsu[v]];
        return v;
    };
    auto unite = [&](Vertex a, Vertex b) {
        a = find(a), b = find(b);
        if (a == b) return;
        if (boundary[a].size() + open[a].size() < boundary[b].size() + open[b].size()) std::swap(a, b);
        dsu[b] = a;
        boundary[a].insert(boundary[a].end(), boundary[b].begin(), boundary[b].end());
        open[a].insert(open[a].end(), open[b].begin(), open[b].end());
        std::vector<Vertex>().swap(boundary[b]);
        std::vector<int>().swap(open[b]);
    };
    auto in_comp = [&](Vertex v, NodeId x) { return shape.in_subtree(x, info.owner(v)); };

    std::vector<std::vector<Vertex>> new_bag;
    std::vector<std::vector<int>> new_children;
    for (auto it = shape.preorder.rbegin(); it != shape.preorder.rend(); ++it) {
        NodeId w = *it;
        const auto& mrg = info.margin(w);
        for (Vertex u : mrg)
            for (Vertex v : g.neighbors(u)) {
                if (in_comp(v, w))
                    unite(u, v);
                else
                    boundary[find(u)].push_back(v);
            }
        if (w == shape.root) break;
        std::vector<Vertex> roots;
        for (Vertex u : mrg) roots.push_back(find(u));
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        for (Vertex r : roots) {
            auto& bd = boundary[r];
            std::vector<Vertex> kept;
            for (Vertex v : bd)
                if (!in_comp(v, w)) kept.push_back(v);
            std::sort(kept.begin(), kept.end());
            kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
            bd = kept;
            std::vector<Vertex> bag = kept;
            for (Vertex u : mrg)
                if (find(u) == r) bag.push_back(u);
            std::sort(bag.begin(), bag.end());
            new_bag.push_back(std::move(bag));
            new_children.push_back(std::move(open[r]));
            open[r].assign(1, static_cast<int>(new_bag.size()) - 1);
        }
    }
    const int root_id = static_cast<int>(new_bag.size());
    new_bag.push_back(d.node_count() ? d.bags[shape.root] : std::vector<Vertex>{});
    new_children.emplace_back();
    for (Vertex v = 0; v < n; ++v)
        if (find(v) == v)
            new_children[root_id].insert(new_children[root_id].end(), open[v].begin(), open[v].end());

    TreeDecomposition out;
    out.parent.assign(new_bag.size(), kNoNode);
    for (std::size_t c = 0; c < new_children.size(); ++c)
        for (int ch : new_children[c]) out.parent[ch] = static_cast<NodeId>(c);
    out.bags = std::move(new_bag);
    out.root = root_id;
    return canonical_order(out);
}

}  // namespace cutl
