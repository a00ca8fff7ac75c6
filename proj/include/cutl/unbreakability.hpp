#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "tree_decomposition.hpp"

namespace cutl {

enum class Mode { Strong, Weak };

inline const char* to_string(Mode m) { return m == Mode::Strong ? "strong" : "weak"; }
inline Mode parse_mode(const std::string& s) {
    if (s == "strong") return Mode::Strong;
    if (s == "weak") return Mode::Weak;
    throw InvalidArgument("unknown mode '" + s + "'");
}

struct SearchBudget {
    double max_work = 1e8;  // C(n, k) * n
};

namespace detail {

inline double binomial(double n, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

inline bool is_clique(const Graph& h, std::span<const Vertex> x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (!h.adjacent(x[i], x[j])) return false;
    return true;
}

// Largest achievable min(|A∩X|, |B∩X|) over separations with separator `sep`.
class SeparatorScan {
public:
    SeparatorScan(const Graph& h, std::span<const Vertex> x)
        : h_(h), in_x_(h.vertex_count(), 0), removed_(h.vertex_count(), 0), label_(h.vertex_count(), -1) {
        for (Vertex v : x) in_x_[v] = 1;
        total_x_ = static_cast<int>(x.size());
    }

    int best_for(const std::vector<Vertex>& sep) {
        int sx = 0;
        for (Vertex v : sep) {
            removed_[v] = 1;
            sx += in_x_[v];
        }
        std::fill(label_.begin(), label_.end(), -1);
        counts_.clear();
        for (Vertex r = 0; r < h_.vertex_count(); ++r) {
            if (removed_[r] || label_[r] >= 0) continue;
            int c = 0, id = static_cast<int>(counts_.size()) + 1;
            queue_.assign(1, r);
            label_[r] = id;
            for (std::size_t i = 0; i < queue_.size(); ++i) {
                Vertex u = queue_[i];
                c += in_x_[u];
                for (Vertex w : h_.neighbors(u))
                    if (!removed_[w] && label_[w] < 0) {
                        label_[w] = id;
                        queue_.push_back(w);
                    }
            }
            counts_.push_back(c);
        }
        for (Vertex v : sep) removed_[v] = 0;
        const int rest = total_x_ - sx;
        // subset sum over component counts: which side sums are reachable
        reach_.assign(rest + 1, 0);
        reach_[0] = 1;
        for (int c : counts_) {
            if (c == 0) continue;
            for (int s = rest; s >= c; --s)
                if (reach_[s - c]) reach_[s] = 1;
        }
        int best = 0;
        for (int s = 0; s <= rest; ++s)
            if (reach_[s]) best = std::max(best, std::min(sx + s, sx + rest - s));
        return best;
    }

private:
    const Graph& h_;
    std::vector<std::uint8_t> in_x_, removed_;
    std::vector<int> label_;
    std::vector<int> counts_;
    std::vector<Vertex> queue_;
    std::vector<std::uint8_t> reach_;
    int total_x_ = 0;
};

}  // namespace detail

// Largest min(|A∩X|, |B∩X|) over separations (A, B) of h of order at most k.
// X is (q, k)-unbreakable in h exactly when this is at most q. `stop_above`
// ends the search once a separation beating it is found.
inline int unbreakability_level(const Graph& h, std::span<const Vertex> x, int k,
                                const SearchBudget& budget = {}, int stop_above = -1) {
    if (k < 0) throw InvalidArgument("negative k");
    const int size = static_cast<int>(x.size());
    if (size <= k) return size;
    if (detail::is_clique(h, x)) return std::min(k, size);
    const int n = h.vertex_count();
    double work = 0;
    for (int j = 0; j <= k; ++j) work += detail::binomial(n, j);
    if (work * std::max(n, 1) > budget.max_work)
        throw TooLarge("separator enumeration over " + std::to_string(n) + " vertices with k=" +
                       std::to_string(k) + " exceeds budget");
    detail::SeparatorScan scan(h, x);
    int best = 0;
    std::vector<Vertex> sep;
    bool done = false;
    auto rec = [&](auto&& self, Vertex start) -> void {
        if (done) return;
        best = std::max(best, scan.best_for(sep));
        if (stop_above >= 0 && best > stop_above) {
            done = true;
            return;
        }
        if (static_cast<int>(sep.size()) == k) return;
        for (Vertex v = start; v < n && !done; ++v) {
            sep.push_back(v);
            self(self, v + 1);
            sep.pop_back();
        }
    };
    rec(rec, 0);
    return best;
}

inline bool is_unbreakable_set(const Graph& h, std::span<const Vertex> x, int q, int k,
                               const SearchBudget& budget = {}) {
    if (static_cast<int>(x.size()) <= q) return true;
    return unbreakability_level(h, x, k, budget, q) <= q;
}

inline bool is_unbreakable_set(const Graph& h, const std::vector<Vertex>& x, int q, int k,
                               const SearchBudget& budget = {}) {
    return is_unbreakable_set(h, std::span<const Vertex>(x), q, k, budget);
}

struct CertificationReport {
    bool ok = true;
    Mode mode = Mode::Strong;
    int q = 0, k = 0;
    std::vector<NodeId> failing_bags;
    std::vector<NodeId> oversized_adhesions;

    std::string summary() const {
        if (ok) return std::string("certified (") + to_string(mode) + ")";
        return std::string("certification failed (") + to_string(mode) + "): " +
               std::to_string(failing_bags.size()) + " breakable bag(s), " +
               std::to_string(oversized_adhesions.size()) + " oversized adhesion(s)";
    }
};

namespace detail {

// Level of bag(x) in G (weak) or G[cone(x)] (strong), capped by stop_above.
inline int bag_level(const Graph& g, const DecompositionInfo& info, NodeId x, int k, Mode mode,
                     const SearchBudget& budget, int stop_above) {
    const auto& bag = info.decomposition().bags[x];
    if (static_cast<int>(bag.size()) <= k) return static_cast<int>(bag.size());
    if (stop_above >= 0 && static_cast<int>(bag.size()) <= stop_above) return static_cast<int>(bag.size());
    if (is_clique(g, bag)) return std::min<int>(k, static_cast<int>(bag.size()));
    if (mode == Mode::Weak) return unbreakability_level(g, bag, k, budget, stop_above);
    auto cone = info.cone(x);
    Graph h = g.induced(cone);
    std::vector<Vertex> local;
    for (Vertex v : bag)
        local.push_back(static_cast<Vertex>(std::lower_bound(cone.begin(), cone.end(), v) - cone.begin()));
    return unbreakability_level(h, local, k, budget, stop_above);
}

}  // namespace detail

inline CertificationReport certify(const Graph& g, const TreeDecomposition& d, int q, int k, Mode mode,
                                   const SearchBudget& budget = {}) {
    require_valid(g, d);
    DecompositionInfo info(d, g.vertex_count());
    CertificationReport rep;
    rep.mode = mode, rep.q = q, rep.k = k;
    for (NodeId x = 0; x < d.node_count(); ++x) {
        if (static_cast<int>(info.adhesion(x).size()) > q) rep.oversized_adhesions.push_back(x);
        if (detail::bag_level(g, info, x, k, mode, budget, q) > q) rep.failing_bags.push_back(x);
    }
    rep.ok = rep.failing_bags.empty() && rep.oversized_adhesions.empty();
    return rep;
}

// Smallest q for which d certifies in the given mode.
inline int minimal_certified_q(const Graph& g, const TreeDecomposition& d, int k, Mode mode,
                               const SearchBudget& budget = {}) {
    require_valid(g, d);
    DecompositionInfo info(d, g.vertex_count());
    int q = static_cast<int>(info.adhesion_width());
    for (NodeId x = 0; x < d.node_count(); ++x)
        if (static_cast<int>(d.bags[x].size()) > q)
            q = std::max(q, detail::bag_level(g, info, x, k, mode, budget, -1));
    return q;
}

}  // namespace cutl
