#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "unbreakability.hpp"

namespace cutl::testkit {

enum class Builder { Trivial, CliqueTree, Heuristic, Generated };

inline const char* to_string(Builder b) {
    switch (b) {
        case Builder::Trivial: return "trivial";
        case Builder::CliqueTree: return "clique-tree";
        case Builder::Heuristic: return "heuristic";
        case Builder::Generated: return "generated";
    }
    return "?";
}

inline Builder parse_builder(const std::string& s) {
    if (s == "trivial") return Builder::Trivial;
    if (s == "clique-tree") return Builder::CliqueTree;
    if (s == "heuristic") return Builder::Heuristic;
    if (s == "generated") return Builder::Generated;
    throw InvalidArgument("unknown builder: " + s);
}

// Default builder per family: clique trees where the graph is chordal, the
// separator heuristic for two-cliques, one bag for random graphs.
inline Builder default_builder(Family f) {
    switch (f) {
        case Family::Tree:
        case Family::Chordal: return Builder::CliqueTree;
        case Family::TwoCliques: return Builder::Heuristic;
        case Family::Er: return Builder::Trivial;
    }
    return Builder::Trivial;
}

struct InstanceParams {
    double density = 0.3;
    int chordal_width = 4;
    int max_q = std::numeric_limits<int>::max();  // instances needing a larger q are regenerated
    int retries = 20;
    std::optional<Builder> builder;
    SearchBudget budget{};
};

struct Instance {
    Family family = Family::Er;
    Builder builder = Builder::Trivial;
    int n = 0;
    std::uint64_t seed = 0;
    int k = 0, q = 0;
    Mode mode = Mode::Strong;
    Graph g;
    TreeDecomposition d;

    std::string describe() const {
        std::ostringstream out;
        out << to_string(family) << " n=" << n << " seed=" << seed << " builder=" << to_string(builder)
            << " k=" << k << " q=" << q << " mode=" << to_string(mode);
        return out.str();
    }
};

inline TreeDecomposition run_builder(Builder b, const Generated& gen, int k, Mode mode, const SearchBudget& budget) {
    switch (b) {
        case Builder::Trivial: return build_trivial(gen.graph);
        case Builder::CliqueTree: return build_clique_tree(gen.graph);
        case Builder::Generated:
            if (!gen.has_decomposition) throw InvalidArgument("family emits no decomposition");
            return gen.decomposition;
        case Builder::Heuristic: {
            auto r = build_heuristic(gen.graph, k, gen.graph.vertex_count(), mode, budget);
            if (!r.ok) throw CertificationFailed(r.reason);
            return r.decomposition;
        }
    }
    throw InvalidArgument("unknown builder");
}

// The trivial builder reports q = |V|; other builders report the smallest
// certified q of the regularized decomposition.
inline int instance_q(const Graph& g, const TreeDecomposition& d, Builder b, int k, Mode mode,
                      const SearchBudget& budget) {
    if (b == Builder::Trivial) return g.vertex_count();
    return minimal_certified_q(g, regularize(g, d), k, mode, budget);
}

inline Instance gen_instance(Family f, int n, int k, Mode mode, std::uint64_t seed, const InstanceParams& p = {}) {
    const Builder b = p.builder.value_or(default_builder(f));
    std::string last = "no attempt";
    for (int attempt = 0; attempt < std::max(1, p.retries); ++attempt) {
        const std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * attempt;
        Rng rng(s);
        try {
            Generated gen = generate(f, n, p.density, rng, p.chordal_width);
            Instance inst;
            inst.family = f;
            inst.builder = b;
            inst.n = n;
            inst.seed = s;
            inst.k = k;
            inst.mode = mode;
            inst.d = run_builder(b, gen, k, mode, p.budget);
            inst.q = instance_q(gen.graph, inst.d, b, k, mode, p.budget);
            inst.g = std::move(gen.graph);
            if (inst.q > p.max_q) {
                last = "q = " + std::to_string(inst.q) + " above the cap";
                continue;
            }
            return inst;
        } catch (const TooLarge& e) {
            last = e.what();
        } catch (const CertificationFailed& e) {
            last = e.what();
        }
    }
    throw GenerationExhausted("no usable " + std::string(to_string(f)) + " instance after retries: " + last);
}

inline std::unique_ptr<ConnectivityOracle> build_instance_oracle(const Instance& inst, TorsoBackend backend) {
    OracleOptions opt;
    opt.q = inst.q;
    return build_oracle(inst.g, inst.d, inst.k, inst.mode, backend, opt);
}

struct Query {
    Vertex s = 0, t = 0;
    std::vector<Vertex> S;
    friend bool operator==(const Query&, const Query&) = default;
};

// Seeded queries: the three corner cases first (s = t, s in S, t in S), then a
// mix of uniform failure sets, subsets of adhesions of `d` (when given), and
// neighbourhoods of low-degree vertices.
inline std::vector<Query> gen_queries(const Graph& g, int k, std::size_t count, std::uint64_t seed,
                                      const TreeDecomposition* d = nullptr) {
    std::vector<Query> out;
    const int n = g.vertex_count();
    if (n == 0 || count == 0) return out;
    Rng rng(seed);
    auto vertex = [&] { return static_cast<Vertex>(uniform_below(rng, n)); };
    std::vector<std::vector<Vertex>> cuts;
    if (d) {
        DecompositionInfo info(*d, n);
        for (NodeId x = 0; x < d->node_count(); ++x)
            if (!info.adhesion(x).empty()) cuts.push_back(info.adhesion(x));
    }
    std::vector<Vertex> low;
    for (Vertex v = 0; v < n; ++v)
        if (g.degree(v) >= 1 && static_cast<int>(g.degree(v)) <= std::max(k, 1)) low.push_back(v);
    auto fill = [&](Query& q, std::vector<Vertex> pool) {
        std::shuffle(pool.begin(), pool.end(), rng);
        for (Vertex v : pool) {
            if (static_cast<int>(q.S.size()) >= k) break;
            if (std::find(q.S.begin(), q.S.end(), v) == q.S.end()) q.S.push_back(v);
        }
    };
    {
        Vertex s = vertex();
        out.push_back({s, s, {}});
    }
    if (k >= 1) {
        Vertex s = vertex(), t = vertex();
        out.push_back({s, t, {s}});
        s = vertex(), t = vertex();
        out.push_back({s, t, {t}});
    }
    while (out.size() < count) {
        Query q{vertex(), vertex(), {}};
        const auto kind = uniform_below(rng, 3);
        if (kind == 1 && !cuts.empty()) {
            fill(q, cuts[uniform_below(rng, cuts.size())]);
        } else if (kind == 2 && !low.empty()) {
            Vertex v = low[uniform_below(rng, low.size())];
            auto nb = g.neighbors(v);
            fill(q, std::vector<Vertex>(nb.begin(), nb.end()));
            q.s = v;
        } else {
            const int j = static_cast<int>(uniform_below(rng, k + 1));
            std::vector<Vertex> pool;
            for (int i = 0; i < j; ++i) pool.push_back(vertex());
            fill(q, pool);
        }
        std::sort(q.S.begin(), q.S.end());
        out.push_back(std::move(q));
    }
    out.resize(count);
    return out;
}

struct WorkloadStats {
    std::size_t queries = 0, connected = 0;
    double median_ns = 0, p99_ns = 0, worst_ns = 0;
    std::uint64_t unbounded_ops = 0;  // summed over all queries
    std::uint64_t max_work = 0;
    std::uint64_t checksum = 1469598103934665603ULL;  // FNV-1a over the answers
};

// Times every query once, in order, on one scratch context.
inline WorkloadStats run_workload(const ConnectivityOracle& o, const std::vector<Query>& qs) {
    using clock = std::chrono::steady_clock;
    WorkloadStats w;
    QueryContext ctx(o);
    std::vector<double> ns;
    ns.reserve(qs.size());
    for (const auto& q : qs) {
        const auto t0 = clock::now();
        const bool r = o.query(ctx, q.s, q.t, q.S);
        const auto t1 = clock::now();
        ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
        w.unbounded_ops += ctx.stats.unbounded_ops;
        w.max_work = std::max(w.max_work, ctx.stats.work);
        w.connected += r;
        w.checksum = (w.checksum ^ static_cast<std::uint64_t>(r ? '1' : '0')) * 1099511628211ULL;
    }
    w.queries = qs.size();
    if (!ns.empty()) {
        std::sort(ns.begin(), ns.end());
        w.median_ns = ns[ns.size() / 2];
        w.p99_ns = ns[std::min(ns.size() - 1, ns.size() * 99 / 100)];
        w.worst_ns = ns.back();
    }
    return w;
}

// Every (s, t, S) with S a set of at most k vertices.
template <class F>
void for_all_queries(int n, int k, F&& f) {
    std::vector<Vertex> S;
    auto rec = [&](auto& self, Vertex from) -> void {
        f(static_cast<const std::vector<Vertex>&>(S));
        if (static_cast<int>(S.size()) == k) return;
        for (Vertex v = from; v < n; ++v) {
            S.push_back(v);
            self(self, v + 1);
            S.pop_back();
        }
    };
    rec(rec, 0);
}

struct Mismatch {
    Query query;
    Query shrunk;
    bool expected = false;
};

struct EquivalenceReport {
    std::string family, builder, mode, backend;
    int n = 0, k = 0, q = 0;
    std::uint64_t seed = 0;
    bool certified = false;
    std::size_t queries = 0;
    std::vector<Mismatch> mismatches;

    // "pass" only for certified runs without mismatches.
    std::string status() const {
        if (!certified) return "uncertified run";
        return mismatches.empty() ? "pass" : "fail";
    }
    bool passed() const { return status() == "pass"; }

    static std::string csv_header() {
        return "family,builder,n,seed,k,q,mode,backend,certified,queries,mismatches,status";
    }
    std::string csv_row() const {
        std::ostringstream out;
        out << family << ',' << builder << ',' << n << ',' << seed << ',' << k << ',' << q << ',' << mode << ','
            << backend << ',' << (certified ? 1 : 0) << ',' << queries << ',' << mismatches.size() << ','
            << status();
        return out.str();
    }

    std::string to_text() const {
        std::ostringstream out;
        out << "instance " << family << ' ' << builder << ' ' << n << ' ' << seed << ' ' << k << ' ' << q << ' '
            << mode << ' ' << backend << ' ' << (certified ? 1 : 0) << '\n';
        out << "queries " << queries << '\n';
        auto put = [&](const Query& q) {
            out << ' ' << q.s << ' ' << q.t << ' ' << q.S.size();
            for (Vertex v : q.S) out << ' ' << v;
        };
        for (const auto& m : mismatches) {
            out << "mismatch " << (m.expected ? 1 : 0);
            put(m.query);
            put(m.shrunk);
            out << '\n';
        }
        out << "status " << status() << '\n';
        return out.str();
    }

    static EquivalenceReport from_text(const std::string& text) {
        EquivalenceReport r;
        std::istringstream in(text);
        std::string line;
        auto get = [](std::istream& ls) {
            Query q;
            std::size_t c = 0;
            if (!(ls >> q.s >> q.t >> c)) throw ParseError(0, "bad query in report");
            q.S.resize(c);
            for (auto& v : q.S)
                if (!(ls >> v)) throw ParseError(0, "bad query in report");
            return q;
        };
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "instance") {
                int c = 0;
                if (!(ls >> r.family >> r.builder >> r.n >> r.seed >> r.k >> r.q >> r.mode >> r.backend >> c))
                    throw ParseError(lineno, "bad instance line");
                r.certified = c != 0;
            } else if (tag == "queries") {
                if (!(ls >> r.queries)) throw ParseError(lineno, "bad queries line");
            } else if (tag == "mismatch") {
                Mismatch m;
                int e = 0;
                if (!(ls >> e)) throw ParseError(lineno, "bad mismatch line");
                m.expected = e != 0;
                m.query = get(ls);
                m.shrunk = get(ls);
                r.mismatches.push_back(std::move(m));
            } else if (tag == "status" || tag.empty()) {
                continue;
            } else {
                throw ParseError(lineno, "unknown report line: " + tag);
            }
        }
        return r;
    }
};

inline bool ground_truth(const Graph& g, const Query& q) {
    return connected_avoiding(g, q.s, q.t, VertexSet(g.vertex_count(), q.S));
}

// Greedy shrinking: drop failed vertices, then lower s and t, keeping the mismatch.
inline Query shrink(const ConnectivityOracle& o, Query q) {
    const Graph& g = o.graph();
    auto bad = [&](const Query& c) { return o.query(c.s, c.t, c.S) != ground_truth(g, c); };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < q.S.size(); ++i) {
            Query c = q;
            c.S.erase(c.S.begin() + i);
            if (bad(c)) {
                q = std::move(c);
                changed = true;
                break;
            }
        }
        for (Vertex v = 0; !changed && v < q.s; ++v) {
            Query c = q;
            c.s = v;
            if (bad(c)) q = std::move(c), changed = true;
        }
        for (Vertex v = 0; !changed && v < q.t; ++v) {
            Query c = q;
            c.t = v;
            if (bad(c)) q = std::move(c), changed = true;
        }
    }
    return q;
}

inline EquivalenceReport run_equivalence(const Instance& inst, const ConnectivityOracle& o,
                                         const std::vector<Query>& queries) {
    EquivalenceReport r;
    r.family = to_string(inst.family);
    r.builder = to_string(inst.builder);
    r.n = inst.n;
    r.seed = inst.seed;
    r.k = o.k();
    r.q = o.q();
    r.mode = to_string(o.mode());
    r.backend = to_string(o.torso_index().backend());
    r.certified = o.certified();
    QueryContext ctx(o);
    for (const auto& q : queries) {
        const bool want = ground_truth(o.graph(), q);
        ++r.queries;
        if (o.query(ctx, q.s, q.t, q.S) != want) r.mismatches.push_back({q, shrink(o, q), want});
    }
    return r;
}

// Checks every profile computed during a query against its definition.
// Strong mode: equal to the set of pairs of D(x) connected in G[cone(x)] - S.
// Weak mode: contains those pairs, and every pair is connected in G - S.
class ProfileAuditor {
public:
    explicit ProfileAuditor(const ConnectivityOracle& o) : o_(&o) {
        const int n = o.graph().vertex_count();
        DecompositionInfo info(o.decomposition(), n);
        in_cone_.resize(o.decomposition().node_count());
        for (NodeId x = 0; x < o.decomposition().node_count(); ++x) {
            in_cone_[x].assign(n, 0);
            for (Vertex v : info.cone(x)) in_cone_[x][v] = 1;
        }
    }

    // Installs the trace hook; call set_failures before each query.
    void attach(QueryContext& ctx) {
        ctx.trace = [this](const Profile& p) { check(p); };
    }

    void set_failures(const std::vector<Vertex>& S) {
        const Graph& g = o_->graph();
        forb_ = VertexSet(g.vertex_count(), S);
        global_ = component_labels(g, forb_);
    }

    std::size_t profiles = 0, violations = 0;

private:
    void check(const Profile& p) {
        ++profiles;
        const Graph& g = o_->graph();
        const int n = g.vertex_count();
        VertexSet outside(n);
        for (Vertex v = 0; v < n; ++v)
            if (!in_cone_[p.node][v] || forb_.contains(v)) outside.insert(v);
        const auto local = component_labels(g, outside);
        for (std::size_t i = 0; i < p.dom.size(); ++i)
            for (std::size_t j = i + 1; j < p.dom.size(); ++j) {
                const Vertex a = p.dom[i], b = p.dom[j];
                const bool has = p.has(a, b);
                const bool lc = local[a] >= 0 && local[a] == local[b];
                const bool gc = global_[a] >= 0 && global_[a] == global_[b];
                if (o_->mode() == Mode::Strong ? has != lc : ((lc && !has) || (has && !gc))) ++violations;
            }
    }

    const ConnectivityOracle* o_;
    std::vector<std::vector<char>> in_cone_;
    VertexSet forb_{0};
    std::vector<int> global_;
};

// Number of violating profile pairs over one query.
inline std::size_t audit_profiles(const ConnectivityOracle& o, Vertex s, Vertex t, const std::vector<Vertex>& S) {
    ProfileAuditor audit(o);
    QueryContext ctx(o);
    audit.attach(ctx);
    audit.set_failures(S);
    o.query(ctx, s, t, S);
    return audit.violations;
}

}  // namespace cutl::testkit
