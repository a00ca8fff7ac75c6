#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bag_graph.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "torso.hpp"
#include "tree_decomposition.hpp"
#include "tree_nav.hpp"
#include "unbreakability.hpp"

namespace cutl {

// Pairs of a small vertex domain, kept as adjacency bit rows.
struct Profile {
    static constexpr std::size_t kMaxDomain = 64;

    NodeId node = kNoNode;
    std::vector<Vertex> dom;
    std::vector<std::uint64_t> row;

    void reset(NodeId x) {
        node = x;
        dom.clear();
        row.clear();
    }
    int index(Vertex v) const {
        for (std::size_t i = 0; i < dom.size(); ++i)
            if (dom[i] == v) return static_cast<int>(i);
        return -1;
    }
    int add_vertex(Vertex v) {
        int i = index(v);
        if (i >= 0) return i;
        if (dom.size() >= kMaxDomain) throw TooLarge("profile domain above 64 vertices");
        dom.push_back(v);
        row.push_back(0);
        return static_cast<int>(dom.size()) - 1;
    }
    void add_pair(int i, int j) {
        row[i] |= std::uint64_t{1} << j;
        row[j] |= std::uint64_t{1} << i;
    }
    bool has(Vertex a, Vertex b) const {
        int i = index(a), j = index(b);
        return i >= 0 && j >= 0 && ((row[i] >> j) & 1);
    }
    std::size_t pair_count() const {
        std::size_t c = 0;
        for (auto r : row) c += std::popcount(r);
        return c / 2;
    }
    std::vector<std::pair<Vertex, Vertex>> pairs() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = i + 1; j < dom.size(); ++j)
                if ((row[i] >> j) & 1) out.emplace_back(std::min(dom[i], dom[j]), std::max(dom[i], dom[j]));
        std::sort(out.begin(), out.end());
        return out;
    }
};

struct QueryStats {
    int x_size = 0, y_size = 0;
    int max_domain = 0;
    std::size_t max_pairs = 0;
    int torso_queries = 0;
    int bfs_runs = 0;
    std::uint64_t work = 0;           // arcs scanned, pairs tested, union-find steps
    std::uint64_t unbounded_ops = 0;  // steps that exceeded a bound depending on q and k only
};

struct OracleOptions {
    int q = -1;            // -1: measure the smallest certified q
    bool certify = true;   // with q given: check it, or take it as declared
    SearchBudget budget{};
    std::size_t closure_budget = 2'000'000;
    bool degree_shortcut = true;  // stop a bag search at a vertex of degree > q
};

class ConnectivityOracle;

// Per-thread scratch for queries. Reusable across queries of one oracle.
class QueryContext {
public:
    QueryContext() = default;
    explicit QueryContext(const ConnectivityOracle& o) { bind(o); }
    inline void bind(const ConnectivityOracle& o);

    QueryStats stats;
    std::function<void(const Profile&)> trace;  // sees every computed profile

private:
    friend class ConnectivityOracle;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<NodeId> xs_;
    std::vector<int> tpar_;
    std::vector<Profile> prof_;
    std::vector<Profile> warped_;
    std::vector<std::int32_t> reached_;
    std::vector<std::int32_t> nbrs_;
    std::vector<int> dsu_;
    std::vector<Vertex> jv_;
    struct Cached {
        std::int32_t a, b;
        bool conn;
    };
    std::vector<Cached> cache_;
};

class ConnectivityOracle {
public:
    ConnectivityOracle(const ConnectivityOracle&) = delete;
    ConnectivityOracle& operator=(const ConnectivityOracle&) = delete;

    // Regularizes d, fixes q, and builds the navigation, bag graphs and torso index.
    static std::unique_ptr<ConnectivityOracle> build(const Graph& g, const TreeDecomposition& d, int k, Mode mode,
                                                     TorsoBackend backend, const OracleOptions& opt = {}) {
        if (k < 0) throw InvalidArgument("k must be nonnegative");
        require_valid(g, d);
        auto o = std::unique_ptr<ConnectivityOracle>(new ConnectivityOracle());
        o->g_ = g;
        o->d_ = regularize(g, d);
        o->k_ = k;
        o->mode_ = mode;
        const int a = static_cast<int>(adhesion_width(o->d_));
        if (opt.q >= 0) {
            o->q_ = opt.q;
            if (opt.certify) {
                auto rep = cutl::certify(g, o->d_, opt.q, k, mode, opt.budget);
                if (!rep.ok) throw CertificationFailed(rep.summary());
                o->certified_ = true;
            }
            if (a > o->q_) throw AdhesionTooLarge("adhesion width exceeds the declared q");
        } else {
            try {
                o->q_ = minimal_certified_q(g, o->d_, k, mode, opt.budget);
            } catch (const TooLarge&) {
                o->q_ = std::max<int>(a, static_cast<int>(max_bag_size(o->d_)));
            }
            o->certified_ = true;
        }
        o->certification_ran_ = opt.q < 0 || opt.certify;
        o->degree_shortcut_ = opt.degree_shortcut;
        o->assemble(backend, opt.closure_budget);
        return o;
    }

    // Rebuilds derived parts from stored pieces (used by image loading).
    static std::unique_ptr<ConnectivityOracle> from_parts(Graph g, TreeDecomposition d, int k, int q, Mode mode,
                                                          bool certified, bool ran, TorsoIndex::Parts torso) {
        auto o = std::unique_ptr<ConnectivityOracle>(new ConnectivityOracle());
        o->g_ = std::move(g);
        o->d_ = std::move(d);
        o->k_ = k;
        o->q_ = q;
        o->mode_ = mode;
        o->certified_ = certified;
        o->certification_ran_ = ran;
        o->nav_ = std::make_unique<NavIndex>(o->d_.parent);
        o->bags_ = std::make_unique<BagGraphs>(build_bag_graphs(o->g_, o->d_));
        o->torso_ = std::make_unique<TorsoIndex>(TorsoIndex::restore(*o->bags_, *o->nav_, std::move(torso)));
        o->finish();
        return o;
    }

    int k() const { return k_; }
    int q() const { return q_; }
    Mode mode() const { return mode_; }
    bool certified() const { return certified_; }
    bool certification_ran() const { return certification_ran_; }
    const Graph& graph() const { return g_; }
    const TreeDecomposition& decomposition() const { return d_; }
    const NavIndex& nav() const { return *nav_; }
    const BagGraphs& bag_graphs() const { return *bags_; }
    const TorsoIndex& torso_index() const { return *torso_; }
    int degree_threshold() const { return degree_cap_; }

    std::size_t memory_bytes() const {
        const auto& b = *bags_;
        std::size_t m = g_.size() * 4 + nav_->memory_bytes() + torso_->memory_bytes();
        m += (b.parent.size() + b.owner.size() + b.margin_local.size() + b.bag_off.size() + b.bag_verts.size() +
              b.adh_off.size() + b.adh_verts.size() * 3 + b.adj_off.size() + b.adj_nb.size() * 2 +
              b.sup_off.size() + b.sup.size()) *
             4;
        return m;
    }

    bool query(Vertex s, Vertex t, std::span<const Vertex> S) const {
        QueryContext ctx(*this);
        return query(ctx, s, t, S);
    }
    bool query(Vertex s, Vertex t, const std::vector<Vertex>& S) const {
        return query(s, t, std::span<const Vertex>(S));
    }

    bool query(QueryContext& ctx, Vertex s, Vertex t, std::span<const Vertex> S) const {
        const int n = g_.vertex_count();
        if (s < 0 || s >= n || t < 0 || t >= n) throw InvalidArgument("query vertex out of range");
        ctx.stats = QueryStats{};
        if (++ctx.epoch_ == 0) {
            std::fill(ctx.stamp_.begin(), ctx.stamp_.end(), 0);
            ctx.epoch_ = 1;
        }
        int distinct = 0;
        for (Vertex u : S) {
            if (u < 0 || u >= n) throw InvalidArgument("failed vertex out of range");
            if (ctx.stamp_[u] != ctx.epoch_) ++distinct;
            ctx.stamp_[u] = ctx.epoch_;
        }
        if (distinct > k_) throw FailureBudget("more than k failed vertices");
        if (in_s(ctx, s) || in_s(ctx, t)) return false;
        if (s == t) return true;

        const auto& b = *bags_;
        const auto& nav = *nav_;
        // X: root and the owners of S ∪ {s, t}; Y: its lca closure
        ctx.xs_.clear();
        ctx.xs_.push_back(nav.root());
        ctx.xs_.push_back(b.owner[s]);
        ctx.xs_.push_back(b.owner[t]);
        for (Vertex u : S) ctx.xs_.push_back(b.owner[u]);
        std::sort(ctx.xs_.begin(), ctx.xs_.end());
        ctx.xs_.erase(std::unique(ctx.xs_.begin(), ctx.xs_.end()), ctx.xs_.end());
        ctx.stats.x_size = static_cast<int>(ctx.xs_.size());
        if (ctx.stats.x_size > k_ + 3) ++ctx.stats.unbounded_ops;
        const std::vector<NodeId> ys = lca_closure(nav, ctx.xs_);
        ctx.stats.y_size = static_cast<int>(ys.size());
        if (ctx.stats.y_size > 2 * k_ + 5) ++ctx.stats.unbounded_ops;
        ctx.tpar_ = closure_tree(nav, ys);
        if (ctx.prof_.size() < ys.size()) ctx.prof_.resize(ys.size());
        if (ctx.warped_.size() < ys.size()) ctx.warped_.resize(ys.size());

        for (std::size_t i = ys.size(); i-- > 0;) {
            const NodeId x = ys[i];
            std::size_t zc = 0;
            for (std::size_t j = i + 1; j < ys.size(); ++j) {
                if (ctx.tpar_[j] != static_cast<int>(i)) continue;
                const NodeId y = ys[j];
                const NodeId z = nav.parent(y) == x ? y : nav.dir_unchecked(x, y);
                warp(ctx, ctx.prof_[j], z, y, s, t, ctx.warped_[zc]);
                ++zc;
            }
            if (zc > static_cast<std::size_t>(k_ + 2)) ++ctx.stats.unbounded_ops;
            aggregate(ctx, x, std::span<const Profile>(ctx.warped_.data(), zc), s, t, ctx.prof_[i]);
        }
        return ctx.prof_[0].has(s, t);
    }

    // One answer per query; queries are split over `threads` workers.
    struct Query {
        Vertex s, t;
        std::vector<Vertex> S;
    };
    std::vector<char> query_batch(const std::vector<Query>& qs, int threads = 1) const {
        std::vector<char> out(qs.size());
        threads = std::max(1, std::min<int>(threads, static_cast<int>(qs.size())));
        auto work = [&](std::size_t from, std::size_t to) {
            QueryContext ctx(*this);
            for (std::size_t i = from; i < to; ++i) out[i] = query(ctx, qs[i].s, qs[i].t, qs[i].S);
        };
        if (threads == 1) {
            work(0, qs.size());
            return out;
        }
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (qs.size() + threads - 1) / threads;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    work(std::min(qs.size(), w * chunk), std::min(qs.size(), (w + 1) * chunk));
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        return out;
    }

private:
    friend class QueryContext;
    ConnectivityOracle() = default;

    void assemble(TorsoBackend backend, std::size_t closure_budget) {
        nav_ = std::make_unique<NavIndex>(d_.parent);
        bags_ = std::make_unique<BagGraphs>(build_bag_graphs(g_, d_));
        const int a = static_cast<int>(bags_->adhesion_width());
        if (a + 2 > static_cast<int>(Profile::kMaxDomain)) throw TooLarge("adhesion width above 62");
        torso_ = std::make_unique<TorsoIndex>(*bags_, *nav_, a, backend, closure_budget);
        finish();
    }

    void finish() {
        const long long qq = q_;
        const long long cap = qq + k_ + static_cast<long long>(k_ + 2) * (qq * (qq - 1) / 2);
        degree_cap_ = static_cast<int>(std::min<long long>(cap, 1 << 30));
    }

    bool in_s(const QueryContext& ctx, Vertex v) const { return ctx.stamp_[v] == ctx.epoch_; }

    bool in_cone(NodeId x, Vertex v) const {
        if (nav_->is_ancestor(x, bags_->owner[v])) return true;
        for (Vertex a : bags_->adhesion(x))
            if (a == v) return true;
        return false;
    }

    void domain(Profile& p, NodeId x, Vertex s, Vertex t) const {
        for (Vertex a : bags_->adhesion(x)) p.add_vertex(a);
        if (in_cone(x, s)) p.add_vertex(s);
        if (in_cone(x, t)) p.add_vertex(t);
    }

    void note(QueryContext& ctx, const Profile& p) const {
        ctx.stats.max_domain = std::max(ctx.stats.max_domain, static_cast<int>(p.dom.size()));
        ctx.stats.max_pairs = std::max(ctx.stats.max_pairs, p.pair_count());
        if (p.dom.size() > static_cast<std::size_t>(q_ + 2)) ++ctx.stats.unbounded_ops;
        if (ctx.trace) ctx.trace(p);
    }

    // profile(z) from profile(y) and torso(z, y), by connectivity in the small graph J - S.
    void warp(QueryContext& ctx, const Profile& py, NodeId z, NodeId y, Vertex s, Vertex t, Profile& out) const {
        if (z == y) {
            out = py;
            return;
        }
        auto& jv = ctx.jv_;
        jv.assign(py.dom.begin(), py.dom.end());
        for (Vertex a : bags_->adhesion(z))
            if (std::find(jv.begin(), jv.end(), a) == jv.end()) jv.push_back(a);
        auto& dsu = ctx.dsu_;
        dsu.resize(jv.size());
        std::iota(dsu.begin(), dsu.end(), 0);
        auto find = [&](int v) {
            while (dsu[v] != v) v = dsu[v] = dsu[dsu[v]], ++ctx.stats.work;
            return v;
        };
        auto idx = [&](Vertex v) {
            for (std::size_t i = 0; i < jv.size(); ++i)
                if (jv[i] == v) return static_cast<int>(i);
            return -1;
        };
        for (std::size_t i = 0; i < py.dom.size(); ++i)
            for (std::uint64_t r = py.row[i]; r; r &= r - 1) dsu[find(static_cast<int>(i))] = find(std::countr_zero(r));
        ++ctx.stats.torso_queries;
        torso_->for_each_edge(z, y, [&](Vertex u, Vertex v) {
            ++ctx.stats.work;
            if (in_s(ctx, u) || in_s(ctx, v)) return;
            dsu[find(idx(u))] = find(idx(v));
        });
        out.reset(z);
        domain(out, z, s, t);
        for (std::size_t i = 0; i < out.dom.size(); ++i) {
            if (in_s(ctx, out.dom[i])) continue;
            const int ri = find(idx(out.dom[i]));
            for (std::size_t j = i + 1; j < out.dom.size(); ++j) {
                ++ctx.stats.work;
                if (!in_s(ctx, out.dom[j]) && find(idx(out.dom[j])) == ri)
                    out.add_pair(static_cast<int>(i), static_cast<int>(j));
            }
        }
        note(ctx, out);
    }

    const Profile* affected(std::span<const Profile> zs, NodeId z) const {
        for (const auto& p : zs)
            if (p.node == z) return &p;
        return nullptr;
    }

    // Neighbours of local vertex a in the S-restricted bag graph of x, or false
    // when its degree there exceeds q.
    bool neighbours(QueryContext& ctx, NodeId x, std::int32_t a, std::span<const Profile> zs) const {
        const auto& b = *bags_;
        auto& out = ctx.nbrs_;
        out.clear();
        if (degree_shortcut_ && b.degree(x, a) > static_cast<std::uint32_t>(degree_cap_)) return false;
        const std::size_t slot = b.bag_off[x] + a;
        const Vertex ga = b.global(x, a);
        for (std::uint32_t arc = b.adj_off[slot]; arc < b.adj_off[slot + 1]; ++arc) {
            ++ctx.stats.work;
            const std::int32_t w = b.adj_nb[arc];
            const Vertex gw = b.global(x, w);
            if (in_s(ctx, gw)) continue;
            const std::int32_t e = b.adj_edge[arc];
            if (e != BagGraphs::kOriginal) {
                auto sup = b.supporters(e);
                bool keep = sup.size() > static_cast<std::size_t>(k_ + 2);
                for (std::size_t i = 0; !keep && i < sup.size(); ++i) {
                    ++ctx.stats.work;
                    const Profile* p = affected(zs, sup[i]);
                    keep = p == nullptr || p->has(ga, gw);
                }
                if (!keep) continue;
            }
            out.push_back(w);
        }
        return !degree_shortcut_ || out.size() <= static_cast<std::size_t>(q_);
    }

    enum class Search { Reached, Big, Exhausted };

    Search bounded_search(QueryContext& ctx, NodeId x, std::int32_t from, std::int32_t to,
                          std::span<const Profile> zs) const {
        ++ctx.stats.bfs_runs;
        auto& reached = ctx.reached_;
        reached.assign(1, from);
        for (std::size_t head = 0; head < reached.size(); ++head) {
            if (!neighbours(ctx, x, reached[head], zs)) return Search::Big;
            for (std::int32_t w : ctx.nbrs_) {
                if (w == to) return Search::Reached;
                if (std::find(reached.begin(), reached.end(), w) != reached.end()) continue;
                reached.push_back(w);
                if (reached.size() >= static_cast<std::size_t>(q_) + 1) return Search::Big;
            }
        }
        return Search::Exhausted;
    }

    bool bag_connected(QueryContext& ctx, NodeId x, std::int32_t a, std::int32_t b, std::span<const Profile> zs) const {
        if (a == b) return true;
        if (a > b) std::swap(a, b);
        for (const auto& c : ctx.cache_)
            if (c.a == a && c.b == b) return c.conn;
        bool conn;
        Search first = bounded_search(ctx, x, a, b, zs);
        if (first == Search::Reached) conn = true;
        else if (first == Search::Exhausted) conn = false;
        else conn = bounded_search(ctx, x, b, a, zs) != Search::Exhausted;
        ctx.cache_.push_back({a, b, conn});
        return conn;
    }

    void aggregate(QueryContext& ctx, NodeId x, std::span<const Profile> zs, Vertex s, Vertex t, Profile& out) const {
        const auto& b = *bags_;
        out.reset(x);
        domain(out, x, s, t);
        ctx.cache_.clear();
        const int m = static_cast<int>(out.dom.size());
        std::int32_t local[Profile::kMaxDomain];
        const Profile* zof[Profile::kMaxDomain];
        NodeId zid[Profile::kMaxDomain];
        for (int i = 0; i < m; ++i) {
            local[i] = b.local_index(x, out.dom[i]);
            zof[i] = nullptr;
            zid[i] = kNoNode;
            if (local[i] < 0) {
                zid[i] = nav_->dir_unchecked(x, b.owner[out.dom[i]]);
                zof[i] = affected(zs, zid[i]);
                if (zof[i] == nullptr) ++ctx.stats.unbounded_ops;  // cannot happen: s, t make their child affected
            }
        }
        for (int i = 0; i < m; ++i) {
            const Vertex u = out.dom[i];
            if (in_s(ctx, u)) continue;
            for (int j = i + 1; j < m; ++j) {
                const Vertex v = out.dom[j];
                if (in_s(ctx, v)) continue;
                ++ctx.stats.work;
                bool conn = false;
                if (local[i] >= 0 && local[j] >= 0) {
                    conn = bag_connected(ctx, x, local[i], local[j], zs);
                } else if (local[i] >= 0 || local[j] >= 0) {
                    const int o = local[i] >= 0 ? j : i;  // the one outside the bag
                    const std::int32_t in = local[i] >= 0 ? local[i] : local[j];
                    const Profile* pz = zof[o];
                    if (pz) {
                        auto adh = b.adhesion(zid[o]);
                        auto up = b.adhesion_up(zid[o]);
                        for (std::size_t w = 0; !conn && w < adh.size(); ++w)
                            conn = !in_s(ctx, adh[w]) && pz->has(out.dom[o], adh[w]) &&
                                   bag_connected(ctx, x, up[w], in, zs);
                    }
                } else if (zof[i] && zof[j]) {
                    if (zid[i] == zid[j] && zof[i]->has(u, v)) conn = true;
                    auto ai = b.adhesion(zid[i]), aj = b.adhesion(zid[j]);
                    auto ui = b.adhesion_up(zid[i]), uj = b.adhesion_up(zid[j]);
                    for (std::size_t w = 0; !conn && w < ai.size(); ++w) {
                        if (in_s(ctx, ai[w]) || !zof[i]->has(u, ai[w])) continue;
                        for (std::size_t w2 = 0; !conn && w2 < aj.size(); ++w2)
                            conn = !in_s(ctx, aj[w2]) && zof[j]->has(aj[w2], v) &&
                                   bag_connected(ctx, x, ui[w], uj[w2], zs);
                    }
                }
                if (conn) out.add_pair(i, j);
            }
        }
        note(ctx, out);
    }

    Graph g_;
    TreeDecomposition d_;
    int k_ = 0, q_ = 0;
    Mode mode_ = Mode::Strong;
    bool certified_ = false, certification_ran_ = false;
    int degree_cap_ = 0;
    bool degree_shortcut_ = true;
    std::unique_ptr<NavIndex> nav_;
    std::unique_ptr<BagGraphs> bags_;
    std::unique_ptr<TorsoIndex> torso_;
};

inline void QueryContext::bind(const ConnectivityOracle& o) {
    stamp_.assign(o.graph().vertex_count(), 0);
    epoch_ = 0;
}

inline std::unique_ptr<ConnectivityOracle> build_oracle(const Graph& g, const TreeDecomposition& d, int k, Mode mode,
                                                        TorsoBackend backend, const OracleOptions& opt = {}) {
    return ConnectivityOracle::build(g, d, k, mode, backend, opt);
}

inline TorsoBackend default_backend(Mode mode) {
    return mode == Mode::Strong ? TorsoBackend::Semigroup : TorsoBackend::Trivial;
}

}  // namespace cutl
