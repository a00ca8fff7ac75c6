#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"
#include "rmq.hpp"
#include "tree_decomposition.hpp"

namespace cutl {

// Navigation over a rooted tree. Every node x is unravelled into a path
// (x,0) ... (x,d(x)) with (x,i) the parent of (x,i-1), and the i-th child of x
// hangs below (x,i). Then lca((x,0),(y,0)) = (lca(x,y), i) and, when x is a
// strict ancestor of y, the i-th child of x is the one leading to y.
class NavIndex {
public:
    NavIndex() = default;
    explicit NavIndex(const std::vector<NodeId>& parent) { build(parent); }

    void build(const std::vector<NodeId>& parent) {
        const int n = static_cast<int>(parent.size());
        parent_ = parent;
        root_ = kNoNode;
        std::vector<int> deg(n, 0);
        for (NodeId x = 0; x < n; ++x) {
            if (parent[x] == kNoNode) {
                if (root_ != kNoNode) throw InvalidArgument("tree has more than one root");
                root_ = x;
            } else {
                if (parent[x] < 0 || parent[x] >= n) throw InvalidArgument("parent out of range");
                ++deg[parent[x]];
            }
        }
        if (n > 0 && root_ == kNoNode) throw CycleDetected("no root: parent links form a cycle");
        child_off_.assign(n + 1, 0);
        for (NodeId x = 0; x < n; ++x) child_off_[x + 1] = child_off_[x] + deg[x];
        child_.assign(child_off_[n], 0);
        std::vector<std::int32_t> fill(child_off_.begin(), child_off_.end() - 1);
        for (NodeId x = 0; x < n; ++x)
            if (parent[x] != kNoNode) child_[fill[parent[x]]++] = x;
        // unravelled tree: node (x,i) has id base_[x] + i
        base_.assign(n + 1, 0);
        for (NodeId x = 0; x < n; ++x) base_[x + 1] = base_[x] + deg[x] + 1;
        const std::int32_t m = n ? base_[n] : 0;
        owner_.assign(m, 0);
        for (NodeId x = 0; x < n; ++x)
            for (std::int32_t j = base_[x]; j < base_[x + 1]; ++j) owner_[j] = x;
        tin_.assign(m, -1);
        top_out_.assign(n, -1);
        depth_.assign(n, 0);
        std::vector<std::int32_t> keys(m), par_at(m);
        if (n == 0) {
            rmq_.build({});
            par_at_.clear();
            return;
        }
        struct Frame {
            std::int32_t id, depth;
            std::uint8_t stage;
        };
        std::vector<Frame> stack{{top(root_), 0, 0}};
        std::int32_t time = 0, visited_tree_nodes = 0;
        std::vector<std::int32_t> tparent(m, -1);
        while (!stack.empty()) {
            Frame& f = stack.back();
            const std::int32_t id = f.id;
            const NodeId x = owner_[id];
            const std::int32_t i = id - base_[x];
            if (f.stage == 0) {
                tin_[id] = time;
                keys[time] = f.depth;
                par_at[time] = tparent[id];
                ++time;
                if (i == deg[x]) ++visited_tree_nodes;
                if (i == 0) {
                    stack.pop_back();
                    continue;
                }
                f.stage = 1;
                tparent[id - 1] = id;
                stack.push_back({id - 1, f.depth + 1, 0});
            } else if (f.stage == 1) {
                f.stage = 2;
                NodeId c = child_[child_off_[x] + i - 1];
                tparent[top(c)] = id;
                depth_[c] = depth_[x] + 1;
                stack.push_back({top(c), f.depth + 1, 0});
            } else {
                stack.pop_back();
            }
        }
        if (time != m || visited_tree_nodes != n) throw CycleDetected("parent links contain a cycle");
        // subtree end of each top node, from the preorder positions
        std::vector<std::int32_t> size(m, 1);
        std::vector<std::int32_t> at(m);
        for (std::int32_t j = 0; j < m; ++j) at[tin_[j]] = j;
        for (std::int32_t p = m - 1; p >= 0; --p) {
            std::int32_t j = at[p];
            if (tparent[j] >= 0) size[tparent[j]] += size[j];
        }
        for (NodeId x = 0; x < n; ++x) top_out_[x] = tin_[top(x)] + size[top(x)] - 1;
        rmq_.build(std::move(keys));
        par_at_ = std::move(par_at);
    }

    int size() const { return static_cast<int>(parent_.size()); }
    NodeId root() const { return root_; }
    NodeId parent(NodeId x) const { return parent_[x]; }
    int depth(NodeId x) const { return depth_[x]; }
    std::span<const NodeId> children(NodeId x) const {
        return {child_.data() + child_off_[x], child_.data() + child_off_[x + 1]};
    }
    int child_count(NodeId x) const { return child_off_[x + 1] - child_off_[x]; }
    const std::vector<NodeId>& parents() const { return parent_; }

    // Preorder rank usable for sorting; ancestors come first.
    std::int32_t order_key(NodeId x) const { return tin_[top(x)]; }

    bool is_ancestor(NodeId x, NodeId y) const {  // x ancestor of y or x == y
        std::int32_t t = tin_[top(y)];
        return tin_[top(x)] <= t && t <= top_out_[x];
    }

    NodeId lca(NodeId x, NodeId y) const { return owner_[lca_unravelled(base_[x], base_[y])]; }

    // Child of x on the path to its strict descendant y.
    NodeId dir(NodeId x, NodeId y) const {
        if (x == y || !is_ancestor(x, y)) throw NotStrictAncestor("dir: not a strict ancestor");
        return dir_unchecked(x, y);
    }
    NodeId dir_unchecked(NodeId x, NodeId y) const {
        std::int32_t z = lca_unravelled(base_[x], base_[y]);
        return child_[child_off_[x] + (z - base_[x]) - 1];
    }

    std::size_t memory_bytes() const {
        return parent_.size() * 4 + child_.size() * 4 + child_off_.size() * 4 + base_.size() * 4 +
               owner_.size() * 4 + tin_.size() * 4 + top_out_.size() * 4 + depth_.size() * 4 +
               rmq_.size() * 12 + par_at_.size() * 4;
    }

private:
    std::int32_t top(NodeId x) const { return base_[x + 1] - 1; }

    std::int32_t lca_unravelled(std::int32_t a, std::int32_t b) const {
        if (a == b) return a;
        std::int32_t l = tin_[a], r = tin_[b];
        if (l > r) std::swap(l, r);
        return par_at_[rmq_.argmin(l + 1, r)];
    }

    std::vector<NodeId> parent_;
    NodeId root_ = kNoNode;
    std::vector<std::int32_t> child_off_;
    std::vector<NodeId> child_;
    std::vector<std::int32_t> base_, owner_, tin_, top_out_, depth_;
    LinearRmq rmq_;
    std::vector<std::int32_t> par_at_;
};

inline NavIndex build_nav(const std::vector<NodeId>& parent) { return NavIndex(parent); }

// Navigation relative to a node subset L: anc(x) is the deepest strict
// ancestor of x in L, and T_L is L below a fresh root standing for "none".
class PartitionNavIndex {
public:
    PartitionNavIndex() = default;

    // `order` lists the nodes of the base tree parents-first.
    PartitionNavIndex(const NavIndex& base, const std::vector<NodeId>& order, std::span<const NodeId> members)
        : base_(&base) {
        const int n = base.size();
        std::vector<std::int32_t> local(n, -1);
        global_.assign(1, kNoNode);
        for (NodeId x : members) {
            if (local[x] >= 0) continue;
            local[x] = static_cast<std::int32_t>(global_.size());
            global_.push_back(x);
        }
        incl_.assign(n, 0);
        std::vector<NodeId> tl_parent(global_.size(), kNoNode);
        for (NodeId x : order) {
            NodeId p = base.parent(x);
            const std::int32_t above = p == kNoNode ? 0 : incl_[p] >> 1;
            if (local[x] >= 0) {
                tl_parent[local[x]] = above;
                incl_[x] = local[x] << 1 | 1;
            } else {
                incl_[x] = above << 1;
            }
        }
        nav_.build(tl_parent);
    }

    void rebind(const NavIndex& base) { base_ = &base; }

    bool contains(NodeId x) const { return incl_[x] & 1; }
    NodeId anc(NodeId x) const {
        NodeId p = base_->parent(x);
        return p == kNoNode ? kNoNode : global_[incl_[p] >> 1];
    }
    std::size_t member_count() const { return global_.size() - 1; }
    const NavIndex& tree() const { return nav_; }

    // Topmost node of L on the path from x down to its descendant y, or kNoNode.
    NodeId topmost_in_set(NodeId x, NodeId y) const {
        if (!base_->is_ancestor(x, y)) throw NotAncestor("topmost_in_set: x is not an ancestor of y");
        return topmost_unchecked(x, y);
    }
    NodeId topmost_unchecked(NodeId x, NodeId y) const {
        const std::int32_t ix = incl_[x];
        return ix & 1 ? x : topmost_below_unchecked(ix, y);
    }
    // Same, excluding x itself.
    NodeId topmost_below(NodeId x, NodeId y) const { return topmost_below_unchecked(incl_[x], y); }

    std::size_t memory_bytes() const { return incl_.size() * 4 + global_.size() * 4 + nav_.memory_bytes(); }

private:
    NodeId topmost_below_unchecked(std::int32_t ix, NodeId y) const {
        const std::int32_t a = ix >> 1, b = incl_[y] >> 1;
        return a == b ? kNoNode : global_[nav_.dir_unchecked(a, b)];
    }

    const NavIndex* base_ = nullptr;
    // base node -> (T_L id of the deepest member on root..x) << 1 | (x in L); id 0 is "none"
    std::vector<std::int32_t> incl_;
    std::vector<NodeId> global_;  // T_L id -> base node
    NavIndex nav_;
};

// Closure of X under pairwise lca, sorted in preorder; size at most 2|X| - 1.
inline std::vector<NodeId> lca_closure(const NavIndex& nav, std::vector<NodeId> xs) {
    auto by_order = [&](NodeId a, NodeId b) { return nav.order_key(a) < nav.order_key(b); };
    std::sort(xs.begin(), xs.end(), by_order);
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const std::size_t k = xs.size();
    for (std::size_t i = 0; i + 1 < k; ++i) xs.push_back(nav.lca(xs[i], xs[i + 1]));
    std::sort(xs.begin(), xs.end(), by_order);
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

// Parent of each entry of a preorder-sorted lca-closed set, as indices (-1 at the top).
inline std::vector<int> closure_tree(const NavIndex& nav, const std::vector<NodeId>& ys) {
    std::vector<int> par(ys.size(), -1), stack;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        while (!stack.empty() && !nav.is_ancestor(ys[stack.back()], ys[i])) stack.pop_back();
        par[i] = stack.empty() ? -1 : stack.back();
        stack.push_back(static_cast<int>(i));
    }
    return par;
}

}  // namespace cutl
