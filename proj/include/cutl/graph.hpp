#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace cutl {

using Vertex = std::int32_t;
using Edge = std::pair<Vertex, Vertex>;

// Simple undirected graph in CSR form with sorted neighbor lists.
class Graph {
public:
    Graph() : offsets_(1, 0) {}

    static Graph from_edges(int n, std::span<const Edge> edges) {
        if (n < 0) throw InvalidArgument("negative vertex count");
        std::vector<Edge> list;
        list.reserve(edges.size() * 2);
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw InvalidArgument("edge endpoint out of range");
            if (u == v) throw InvalidArgument("self-loop");
            list.emplace_back(u, v);
            list.emplace_back(v, u);
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        Graph g;
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        g.targets_.resize(list.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            ++g.offsets_[list[i].first + 1];
            g.targets_[i] = list[i].second;
        }
        for (int v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
        return g;
    }

    static Graph from_edges(int n, const std::vector<Edge>& edges) {
        return from_edges(n, std::span<const Edge>(edges.data(), edges.size()));
    }

    int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
    std::size_t edge_count() const { return targets_.size() / 2; }
    // |V| + |E|
    std::size_t size() const { return vertex_count() + edge_count(); }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    int degree(Vertex v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }

    bool adjacent(Vertex u, Vertex v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    bool contains(Vertex v) const { return v >= 0 && v < vertex_count(); }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count());
        for (Vertex u = 0; u < vertex_count(); ++u)
            for (Vertex v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    const std::vector<Vertex>& targets() const { return targets_; }

    static Graph from_csr(std::vector<std::uint64_t> offsets, std::vector<Vertex> targets) {
        Graph g;
        g.offsets_ = std::move(offsets);
        g.targets_ = std::move(targets);
        return g;
    }

    // Subgraph induced by `keep` (sorted, distinct); vertex i of the result is keep[i].
    Graph induced(const std::vector<Vertex>& keep) const {
        std::vector<int> local(vertex_count(), -1);
        for (std::size_t i = 0; i < keep.size(); ++i) local[keep[i]] = static_cast<int>(i);
        std::vector<Edge> es;
        for (std::size_t i = 0; i < keep.size(); ++i)
            for (Vertex w : neighbors(keep[i]))
                if (local[w] > static_cast<int>(i)) es.emplace_back(static_cast<int>(i), local[w]);
        return from_edges(static_cast<int>(keep.size()), es);
    }

private:
    std::vector<std::uint64_t> offsets_;
    std::vector<Vertex> targets_;
};

// Set of vertices with O(1) membership and insertion-order iteration.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int universe) : mark_(universe, 0) {}
    VertexSet(int universe, std::span<const Vertex> vs) : mark_(universe, 0) {
        for (Vertex v : vs) insert(v);
    }
    VertexSet(int universe, std::initializer_list<Vertex> vs) : mark_(universe, 0) {
        for (Vertex v : vs) insert(v);
    }

    bool contains(Vertex v) const {
        return v >= 0 && static_cast<std::size_t>(v) < mark_.size() && mark_[v];
    }
    void insert(Vertex v) {
        if (v < 0 || static_cast<std::size_t>(v) >= mark_.size())
            throw InvalidArgument("vertex outside set universe");
        if (!mark_[v]) {
            mark_[v] = 1;
            members_.push_back(v);
        }
    }
    void clear() {
        for (Vertex v : members_) mark_[v] = 0;
        members_.clear();
    }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    int universe() const { return static_cast<int>(mark_.size()); }
    const std::vector<Vertex>& members() const { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

private:
    std::vector<std::uint8_t> mark_;
    std::vector<Vertex> members_;
};

// Epoch-stamped marks: clearing is O(1).
class StampedMarks {
public:
    StampedMarks() = default;
    explicit StampedMarks(std::size_t n) : stamp_(n, 0) {}
    void resize(std::size_t n) { stamp_.assign(n, 0), epoch_ = 1; }
    void clear() {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
    }
    bool test(std::size_t i) const { return stamp_[i] == epoch_; }
    void set(std::size_t i) { stamp_[i] = epoch_; }
    std::size_t size() const { return stamp_.size(); }

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 1;
};

// ---- text format ---------------------------------------------------------

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline Graph read_graph(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    long long n = -1, m = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(strip_comment(line));
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "p") {
            if (n >= 0) throw ParseError(lineno, "duplicate header");
            if (!(ss >> n >> m) || n < 0 || m < 0) throw ParseError(lineno, "bad header");
            if (n > (1LL << 30)) throw ParseError(lineno, "vertex count too large");
        } else if (tag == "e") {
            if (n < 0) throw ParseError(lineno, "edge before header");
            long long u, v;
            if (!(ss >> u >> v)) throw ParseError(lineno, "bad edge line");
            if (u < 0 || v < 0 || u >= n || v >= n) throw ParseError(lineno, "vertex out of range");
            if (u == v) throw ParseError(lineno, "self-loop");
            edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
        } else {
            throw ParseError(lineno, "unknown line tag '" + tag + "'");
        }
        std::string extra;
        if (ss >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");
    }
    if (n < 0) throw ParseError(lineno, "missing header");
    return Graph::from_edges(static_cast<int>(n), edges);
}

inline Graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return read_graph(in);
}

inline void write_graph(std::ostream& out, const Graph& g) {
    out << "p " << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
}

// ---- searches ------------------------------------------------------------

struct BfsResult {
    std::vector<Vertex> reached;
    bool truncated = false;
};

// BFS from `source` in g - forbidden, stopping before |reached| exceeds cap.
inline BfsResult truncated_bfs(const Graph& g, Vertex source, const VertexSet& forbidden,
                               std::size_t cap) {
    if (!g.contains(source)) throw InvalidArgument("source out of range");
    if (forbidden.contains(source)) throw SourceForbidden("source is forbidden");
    BfsResult r;
    if (cap == 0) {
        r.truncated = true;
        return r;
    }
    std::vector<std::uint8_t> seen(g.vertex_count(), 0);
    r.reached.push_back(source);
    seen[source] = 1;
    for (std::size_t head = 0; head < r.reached.size(); ++head) {
        for (Vertex w : g.neighbors(r.reached[head])) {
            if (seen[w] || forbidden.contains(w)) continue;
            if (r.reached.size() == cap) {
                r.truncated = true;
                return r;
            }
            seen[w] = 1;
            r.reached.push_back(w);
        }
    }
    return r;
}

inline bool connected_avoiding(const Graph& g, Vertex s, Vertex t, const VertexSet& forbidden) {
    if (!g.contains(s) || !g.contains(t)) throw InvalidArgument("vertex out of range");
    if (forbidden.contains(s) || forbidden.contains(t)) return false;
    if (s == t) return true;
    std::vector<std::uint8_t> seen(g.vertex_count(), 0);
    std::vector<Vertex> queue{s};
    seen[s] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (Vertex w : g.neighbors(queue[head])) {
            if (seen[w] || forbidden.contains(w)) continue;
            if (w == t) return true;
            seen[w] = 1;
            queue.push_back(w);
        }
    }
    return false;
}

// Component label per vertex of g - forbidden (-1 on forbidden vertices).
inline std::vector<int> component_labels(const Graph& g, const VertexSet& forbidden) {
    std::vector<int> label(g.vertex_count(), -1);
    std::vector<Vertex> queue;
    int next = 0;
    for (Vertex r = 0; r < g.vertex_count(); ++r) {
        if (label[r] >= 0 || forbidden.contains(r)) continue;
        queue.assign(1, r);
        label[r] = next;
        for (std::size_t head = 0; head < queue.size(); ++head)
            for (Vertex w : g.neighbors(queue[head]))
                if (label[w] < 0 && !forbidden.contains(w)) {
                    label[w] = next;
                    queue.push_back(w);
                }
        ++next;
    }
    return label;
}

// Blocks of g - forbidden, each sorted, ordered by smallest member.
inline std::vector<std::vector<Vertex>> components_avoiding(const Graph& g,
                                                            const VertexSet& forbidden) {
    auto label = component_labels(g, forbidden);
    int count = 0;
    for (int l : label) count = std::max(count, l + 1);
    std::vector<std::vector<Vertex>> blocks(count);
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (label[v] >= 0) blocks[label[v]].push_back(v);
    return blocks;
}

}  // namespace cutl
