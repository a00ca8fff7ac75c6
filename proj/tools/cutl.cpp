#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "cutl/builders.hpp"
#include "cutl/generators.hpp"
#include "cutl/image.hpp"
#include "cutl/oracle.hpp"
#include "cutl/testkit.hpp"

using namespace cutl;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kCertify = 3, kQueryFormat = 4 };

struct QueryFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    return read_graph(in);
}

TreeDecomposition load_decomposition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    return read_decomposition(in);
}

// Batch lines: "s t v1 ... vj"; blank lines and lines starting with '#' are skipped.
std::vector<testkit::Query> load_batch(const std::string& path, int n, int k) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
        file.open(path);
        if (!file) throw QueryFormatError("cannot open " + path);
        in = &file;
    }
    std::vector<testkit::Query> out;
    std::string line;
    for (int lineno = 1; std::getline(*in, line); ++lineno) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<long long> nums;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                long long v = std::stoll(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                nums.push_back(v);
            } catch (const std::exception&) {
                throw QueryFormatError("line " + std::to_string(lineno) + ": not a vertex id: " + tok);
            }
        }
        if (nums.size() < 2) throw QueryFormatError("line " + std::to_string(lineno) + ": expected s t [S...]");
        for (long long v : nums)
            if (v < 0 || v >= n) throw QueryFormatError("line " + std::to_string(lineno) + ": vertex out of range");
        testkit::Query q;
        q.s = static_cast<Vertex>(nums[0]);
        q.t = static_cast<Vertex>(nums[1]);
        std::set<Vertex> distinct;
        for (std::size_t i = 2; i < nums.size(); ++i) {
            q.S.push_back(static_cast<Vertex>(nums[i]));
            distinct.insert(static_cast<Vertex>(nums[i]));
        }
        if (k >= 0 && static_cast<int>(distinct.size()) > k)
            throw QueryFormatError("line " + std::to_string(lineno) + ": more than k = " + std::to_string(k) +
                                   " failed vertices");
        out.push_back(std::move(q));
    }
    return out;
}

void print_answers(const std::vector<char>& ans) {
    std::string buf;
    buf.reserve(ans.size() * 2);
    for (char a : ans) buf += a ? "1\n" : "0\n";
    std::cout << buf;
}

void warn_uncertified(const ConnectivityOracle& o) {
    if (!o.certified()) std::cerr << "warning: oracle built without certification; answers are not guaranteed\n";
}

struct BuildArgs {
    std::string graph, decomp, builder, mode = "strong", backend, out, report;
    int k = -1, q = -1;
    bool verify = false;
};

std::unique_ptr<ConnectivityOracle> build_from(const BuildArgs& a, double& seconds) {
    if (a.k < 0) throw InvalidArgument("--k is required and must be nonnegative");
    const Mode mode = parse_mode(a.mode);
    const TorsoBackend backend = a.backend.empty() ? default_backend(mode) : parse_backend(a.backend);
    Graph g = load_graph(a.graph);
    const auto t0 = std::chrono::steady_clock::now();
    TreeDecomposition d;
    OracleOptions opt;
    opt.q = a.q;
    opt.certify = a.verify || a.q < 0;
    if (!a.decomp.empty()) {
        d = load_decomposition(a.decomp);
    } else {
        switch (testkit::parse_builder(a.builder.empty() ? "trivial" : a.builder)) {
            case testkit::Builder::Trivial:
                d = build_trivial(g);
                if (opt.q < 0) opt.q = g.vertex_count();
                break;
            case testkit::Builder::CliqueTree: d = build_clique_tree(g); break;
            case testkit::Builder::Heuristic: {
                auto r = build_heuristic(g, a.k, g.vertex_count(), mode);
                if (!r.ok) throw CertificationFailed(r.reason);
                d = std::move(r.decomposition);
                break;
            }
            case testkit::Builder::Generated: throw InvalidArgument("builder 'generated' needs --decomp");
        }
    }
    auto o = build_oracle(g, d, a.k, mode, backend, opt);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

std::string build_report(const ConnectivityOracle& o, double seconds) {
    std::ostringstream r;
    const auto& g = o.graph();
    r << "n " << g.vertex_count() << '\n'
      << "m " << g.edge_count() << '\n'
      << "nodes " << o.decomposition().node_count() << '\n'
      << "adhesion " << adhesion_width(o.decomposition()) << '\n'
      << "k " << o.k() << '\n'
      << "q " << o.q() << '\n'
      << "mode " << to_string(o.mode()) << '\n'
      << "backend " << to_string(o.torso_index().backend()) << '\n'
      << "certification " << (o.certified() ? "certified" : "uncertified") << '\n'
      << "build_seconds " << seconds << '\n';
    return r.str();
}

void add_build_flags(CLI::App* c, BuildArgs& a) {
    c->add_option("--graph", a.graph, "graph file")->required();
    auto* dec = c->add_option("--decomp", a.decomp, "tree decomposition file");
    c->add_option("--builder", a.builder, "trivial | clique-tree | heuristic")->excludes(dec);
    c->add_option("--k", a.k, "failure budget")->required();
    c->add_option("--q", a.q, "declared unbreakability parameter (default: measured)");
    c->add_option("--mode", a.mode, "strong | weak");
    c->add_option("--backend", a.backend, "trivial | semigroup");
    c->add_flag("--verify", a.verify, "certify a declared q");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cutl: connectivity oracle under vertex failures"};
    app.require_subcommand(1);

    BuildArgs b;
    auto* build = app.add_subcommand("build", "build an oracle image");
    add_build_flags(build, b);
    build->add_option("--out", b.out, "oracle image path")->required();
    build->add_option("--report", b.report, "also write the build report here");

    std::string cg, cd, cmode = "strong";
    int ck = -1, cq = -1;
    auto* cert = app.add_subcommand("certify", "check or measure the unbreakability of a decomposition");
    cert->add_option("--graph", cg)->required();
    cert->add_option("--decomp", cd)->required();
    cert->add_option("--k", ck)->required();
    cert->add_option("--q", cq, "check this q (default: report the smallest certified q)");
    cert->add_option("--mode", cmode);

    std::string qimage, qbatch = "-";
    bool timing = false;
    int threads = 1;
    auto* query = app.add_subcommand("query", "answer a query batch with an oracle image");
    query->add_option("--image", qimage)->required();
    query->add_option("batch", qbatch, "batch file (default: stdin)");
    query->add_flag("--timing", timing, "append median/worst per-query time");
    query->add_option("--threads", threads)->check(CLI::PositiveNumber);

    std::string ograph, obatch = "-";
    int ok = -1;
    auto* oracle = app.add_subcommand("oracle", "answer a query batch by brute force");
    oracle->add_option("--graph", ograph)->required();
    oracle->add_option("batch", obatch, "batch file (default: stdin)");
    oracle->add_option("--k", ok, "reject lines with more than k failed vertices");

    std::string gfamily, gout, gdout;
    int gn = 0, gwidth = 4;
    double gdensity = 0.3;
    std::uint64_t gseed = 1;
    auto* gen = app.add_subcommand("gen", "generate a graph");
    gen->add_option("family", gfamily, "er | tree | chordal | two-cliques")->required();
    gen->add_option("n", gn)->required()->check(CLI::NonNegativeNumber);
    gen->add_option("density", gdensity)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", gseed);
    gen->add_option("--width", gwidth, "chordal clique width");
    gen->add_option("--out", gout, "graph path (default: stdout)");
    gen->add_option("--decomp-out", gdout, "decomposition path (default: <out>.td when the family emits one)");

    BuildArgs bb;
    std::string bimage;
    std::size_t bcount = 1000;
    std::uint64_t bseed = 1;
    bool bheader = false;
    auto* bench = app.add_subcommand("bench", "time a generated workload; prints one CSV row");
    bench->add_option("--image", bimage, "oracle image (otherwise build from --graph)");
    bench->add_option("--graph", bb.graph);
    bench->add_option("--decomp", bb.decomp);
    bench->add_option("--builder", bb.builder);
    bench->add_option("--k", bb.k);
    bench->add_option("--q", bb.q);
    bench->add_option("--mode", bb.mode);
    bench->add_option("--backend", bb.backend);
    bench->add_option("--queries", bcount);
    bench->add_option("--seed", bseed);
    bench->add_flag("--header", bheader, "print the CSV header first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }

    try {
        if (*build) {
            double secs = 0;
            auto o = build_from(b, secs);
            warn_uncertified(*o);
            save_image_file(b.out, *o);
            const std::string rep = build_report(*o, secs);
            std::cout << rep;
            if (!b.report.empty()) std::ofstream(b.report) << rep;
        } else if (*cert) {
            Graph g = load_graph(cg);
            TreeDecomposition d = regularize(g, load_decomposition(cd));
            const Mode mode = parse_mode(cmode);
            if (cq >= 0) {
                auto rep = certify(g, d, cq, ck, mode);
                std::cout << rep.summary() << '\n';
                if (!rep.ok) return kCertify;
            } else {
                std::cout << "q " << minimal_certified_q(g, d, ck, mode) << '\n';
            }
        } else if (*query) {
            auto o = load_image_file(qimage);
            warn_uncertified(*o);
            auto batch = load_batch(qbatch, o->graph().vertex_count(), o->k());
            if (timing) {
                auto w = testkit::run_workload(*o, batch);
                QueryContext ctx(*o);
                std::vector<char> ans;
                for (const auto& q : batch) ans.push_back(o->query(ctx, q.s, q.t, q.S));
                print_answers(ans);
                std::cout << "# timing median_ns " << w.median_ns << " worst_ns " << w.worst_ns << '\n';
            } else {
                std::vector<ConnectivityOracle::Query> qs;
                for (auto& q : batch) qs.push_back({q.s, q.t, q.S});
                print_answers(o->query_batch(qs, threads));
            }
        } else if (*oracle) {
            Graph g = load_graph(ograph);
            auto batch = load_batch(obatch, g.vertex_count(), ok);
            std::vector<char> ans;
            for (const auto& q : batch) ans.push_back(testkit::ground_truth(g, q));
            print_answers(ans);
        } else if (*gen) {
            Rng rng(gseed);
            Generated r = generate(parse_family(gfamily), gn, gdensity, rng, gwidth);
            if (gout.empty()) {
                write_graph(std::cout, r.graph);
            } else {
                std::ofstream out(gout);
                write_graph(out, r.graph);
                if (!out) throw std::runtime_error("cannot write " + gout);
            }
            if (gdout.empty() && !gout.empty() && r.has_decomposition) gdout = gout + ".td";
            if (!gdout.empty()) {
                if (!r.has_decomposition) throw InvalidArgument("family " + gfamily + " emits no decomposition");
                std::ofstream out(gdout);
                write_decomposition(out, r.decomposition);
                if (!out) throw std::runtime_error("cannot write " + gdout);
            }
        } else if (*bench) {
            std::unique_ptr<ConnectivityOracle> o;
            double secs = -1;
            if (!bimage.empty()) {
                o = load_image_file(bimage);
            } else if (!bb.graph.empty()) {
                o = build_from(bb, secs);
            } else {
                throw InvalidArgument("bench needs --image or --graph");
            }
            warn_uncertified(*o);
            const int k = bb.k >= 0 ? std::min(bb.k, o->k()) : o->k();
            auto qs = testkit::gen_queries(o->graph(), k, bcount, bseed, &o->decomposition());
            auto w = testkit::run_workload(*o, qs);
            if (bheader)
                std::cout << "n,m,nodes,k,q,backend,build_s,image_bytes,queries,connected,checksum,unbounded_ops,"
                             "median_ns,p99_ns,worst_ns\n";
            std::cout << o->graph().vertex_count() << ',' << o->graph().edge_count() << ','
                      << o->decomposition().node_count() << ',' << o->k() << ',' << o->q() << ','
                      << to_string(o->torso_index().backend()) << ',' << secs << ',' << image_size(*o) << ','
                      << w.queries << ',' << w.connected << ',' << w.checksum << ',' << w.unbounded_ops << ','
                      << w.median_ns << ',' << w.p99_ns << ',' << w.worst_ns << '\n';
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const CertificationFailed& e) {
        std::cerr << "certification failed: " << e.what() << '\n';
        return kCertify;
    } catch (const QueryFormatError& e) {
        std::cerr << "query format error: " << e.what() << '\n';
        return kQueryFormat;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kParse;
    } catch (const ImageError& e) {
        std::cerr << "image error: " << e.what() << '\n';
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
