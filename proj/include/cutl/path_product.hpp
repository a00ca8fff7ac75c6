#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "error.hpp"
#include "semigroup.hpp"
#include "tree_nav.hpp"

namespace cutl {

inline constexpr std::uint32_t kNoFunction = std::numeric_limits<std::uint32_t>::max();

// Answers f_{vw}(x) for a tree whose edges carry functions on [0, s): the
// composition of the edge functions along the path from v down to w.
// Each node v holds a bijective coloring c_v of [0, s) with
// c_w(f(x)) <= c_v(x) along every edge; a child w is i-decreasing when some
// element of color i at the parent lands on a smaller color at w.
class FunctionalIndex {
public:
    FunctionalIndex() = default;

    // fn_of[w] indexes `functions` for every non-root node; `preorder` lists parents first.
    FunctionalIndex(const NavIndex& nav, const std::vector<NodeId>& preorder, std::uint32_t ground,
                    std::vector<std::uint32_t> fn_of, std::vector<std::vector<std::uint32_t>> functions)
        : nav_(&nav), s_(ground), fn_of_(std::move(fn_of)) {
        const int n = nav.size();
        funcs_.reserve(functions.size() * s_);
        for (const auto& f : functions) {
            if (f.size() != s_) throw InvalidArgument("function of wrong size");
            for (auto y : f)
                if (y >= s_) throw InvalidArgument("function leaves the ground set");
            funcs_.insert(funcs_.end(), f.begin(), f.end());
        }
        color_.assign(static_cast<std::size_t>(n) * s_, 0);
        inverse_.assign(static_cast<std::size_t>(n) * s_, 0);
        std::vector<std::vector<NodeId>> members(s_);
        std::vector<std::uint32_t> best(s_);
        std::vector<std::uint8_t> used(s_);
        const std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
        for (NodeId w : preorder) {
            std::uint32_t* cw = color_.data() + static_cast<std::size_t>(w) * s_;
            NodeId v = nav.parent(w);
            if (v == kNoNode) {
                for (std::uint32_t x = 0; x < s_; ++x) cw[x] = x;
            } else {
                if (fn_of_[w] == kNoFunction || fn_of_[w] * static_cast<std::size_t>(s_) >= funcs_.size())
                    throw InvalidArgument("edge without a function");
                const std::uint32_t* f = funcs_.data() + static_cast<std::size_t>(fn_of_[w]) * s_;
                const std::uint32_t* cv = color_.data() + static_cast<std::size_t>(v) * s_;
                std::fill(best.begin(), best.end(), none);
                std::fill(used.begin(), used.end(), 0);
                for (std::uint32_t x = 0; x < s_; ++x) best[f[x]] = std::min(best[f[x]], cv[x]);
                for (std::uint32_t y = 0; y < s_; ++y)
                    if (best[y] != none) used[best[y]] = 1, cw[y] = best[y];
                std::uint32_t next = 0;
                for (std::uint32_t y = 0; y < s_; ++y) {
                    if (best[y] != none) continue;
                    while (used[next]) ++next;
                    cw[y] = next;
                    used[next] = 1;
                }
                for (std::uint32_t x = 0; x < s_; ++x)
                    if (cw[f[x]] < cv[x]) {
                        auto& m = members[cv[x]];
                        if (m.empty() || m.back() != w) m.push_back(w);
                    }
            }
            std::uint32_t* iw = inverse_.data() + static_cast<std::size_t>(w) * s_;
            for (std::uint32_t x = 0; x < s_; ++x) iw[cw[x]] = x;
        }
        parts_.reserve(s_);
        for (std::uint32_t i = 0; i < s_; ++i) {
            parts_.emplace_back(nav, preorder, members[i]);
            std::vector<NodeId>().swap(members[i]);
        }
    }

    void rebind(const NavIndex& nav) {
        nav_ = &nav;
        for (auto& p : parts_) p.rebind(nav);
    }

    std::uint32_t ground_size() const { return s_; }
    std::uint32_t color(NodeId v, std::uint32_t x) const { return color_[static_cast<std::size_t>(v) * s_ + x]; }
    std::uint32_t with_color(NodeId v, std::uint32_t i) const {
        return inverse_[static_cast<std::size_t>(v) * s_ + i];
    }
    std::uint32_t apply_edge(NodeId w, std::uint32_t x) const {
        return funcs_[static_cast<std::size_t>(fn_of_[w]) * s_ + x];
    }
    const PartitionNavIndex& decreasing(std::uint32_t i) const { return parts_[i]; }

    // f_{vw}(x) for v an ancestor of w (v == w gives x). `depth` receives the
    // number of jumps taken, which never exceeds the ground set size.
    std::uint32_t query(NodeId v, NodeId w, std::uint32_t x, int* depth = nullptr) const {
        if (!nav_->is_ancestor(v, w)) throw NotAncestor("query: v is not an ancestor of w");
        if (x >= s_) throw InvalidArgument("element outside the ground set");
        int jumps = 0;
        while (v != w) {
            const std::uint32_t i = color(v, x);
            NodeId top = parts_[i].topmost_below(v, w);
            if (top == kNoNode) {
                x = with_color(w, i);
                break;
            }
            NodeId up = nav_->parent(top);
            x = apply_edge(top, with_color(up, i));
            v = top;
            ++jumps;
        }
        if (depth) *depth = jumps;
        return x;
    }

    std::size_t memory_bytes() const {
        std::size_t b = (color_.size() + inverse_.size() + funcs_.size() + fn_of_.size()) * 4;
        for (const auto& p : parts_) b += p.memory_bytes();
        return b;
    }

    std::size_t decreasing_total() const {
        std::size_t t = 0;
        for (const auto& p : parts_) t += p.member_count();
        return t;
    }

private:
    const NavIndex* nav_ = nullptr;
    std::uint32_t s_ = 0;
    std::vector<std::uint32_t> fn_of_;
    std::vector<std::uint32_t> funcs_;  // function-major
    std::vector<std::uint32_t> color_, inverse_;
    std::vector<PartitionNavIndex> parts_;
};

// Path products in a tree whose edges carry semigroup generators: the edge into
// w carries labels[w]. Uses f = (b -> b · label) on the ground set of all
// elements, so sigma(x, y) is the image of the identity.
template <class T, class H>
class PathIndex {
public:
    PathIndex() = default;
    PathIndex(const SemigroupTable<T, H>& table, const NavIndex& nav, const std::vector<NodeId>& preorder,
              const std::vector<std::uint32_t>& labels)
        : labels_(labels) {
        const auto& gens = table.generators();
        std::vector<std::uint32_t> fn_of(nav.size(), kNoFunction);
        for (NodeId w = 0; w < nav.size(); ++w)
            if (nav.parent(w) != kNoNode) fn_of[w] = static_cast<std::uint32_t>(table.generator_index(labels[w]));
        std::vector<std::vector<std::uint32_t>> fns(gens.size());
        for (std::size_t g = 0; g < gens.size(); ++g) {
            const std::uint32_t* col = table.generator_column(g);
            fns[g].assign(col, col + table.size());
        }
        index_ = FunctionalIndex(nav, preorder, static_cast<std::uint32_t>(table.size()), std::move(fn_of),
                                 std::move(fns));
    }

    void rebind(const NavIndex& nav) { index_.rebind(nav); }

    // Product of the labels on the path from x down to y (identity when x == y).
    std::uint32_t path_product(NodeId x, NodeId y, int* depth = nullptr) const {
        return index_.query(x, y, SemigroupTable<T, H>::kIdentity, depth);
    }

    const FunctionalIndex& functional() const { return index_; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }

private:
    std::vector<std::uint32_t> labels_;
    FunctionalIndex index_;
};

template <class T, class H>
std::uint32_t naive_path_product(const SemigroupTable<T, H>& table, const NavIndex& nav,
                                 const std::vector<std::uint32_t>& labels, NodeId x, NodeId y) {
    if (!nav.is_ancestor(x, y)) throw NotAncestor("naive_path_product: x is not an ancestor of y");
    std::vector<std::uint32_t> path;
    for (NodeId w = y; w != x; w = nav.parent(w)) path.push_back(labels[w]);
    std::uint32_t acc = SemigroupTable<T, H>::kIdentity;
    for (auto it = path.rbegin(); it != path.rend(); ++it) acc = table.product(acc, *it);
    return acc;
}

}  // namespace cutl
