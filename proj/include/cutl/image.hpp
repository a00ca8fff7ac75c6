#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "error.hpp"
#include "oracle.hpp"

namespace cutl {

// Binary oracle image: magic, version, payload, FNV-1a checksum of the payload.
// Only the graph, the regular decomposition and the torso tables are stored;
// navigation, bag graphs and the path index are rebuilt on load.
inline constexpr char kImageMagic[6] = {'C', 'U', 'T', 'L', '1', '\0'};
inline constexpr std::uint32_t kImageVersion = 1;

namespace detail {

class Writer {
public:
    template <class T>
    void pod(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const char* p = reinterpret_cast<const char*>(&v);
        buf_.append(p, sizeof(T));
    }
    template <class T>
    void vec(const std::vector<T>& v) {
        pod<std::uint64_t>(v.size());
        if (!v.empty()) buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
    }
    void str(const std::string& s) {
        pod<std::uint64_t>(s.size());
        buf_.append(s);
    }
    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(const std::string& s) : s_(s) {}
    template <class T>
    T pod() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, s_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    template <class T>
    std::vector<T> vec() {
        auto n = pod<std::uint64_t>();
        if (n > (s_.size() - pos_) / sizeof(T)) throw ImageError("image truncated");
        std::vector<T> v(n);
        if (n) std::memcpy(v.data(), s_.data() + pos_, n * sizeof(T));
        pos_ += n * sizeof(T);
        return v;
    }
    std::string str() {
        auto n = pod<std::uint64_t>();
        need(n);
        std::string out = s_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    bool done() const { return pos_ == s_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > s_.size()) throw ImageError("image truncated");
    }
    const std::string& s_;
    std::size_t pos_ = 0;
};

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

inline void put_basics(Writer& w, const std::vector<BasicGraph>& v) {
    w.pod<std::uint64_t>(v.size());
    for (const auto& g : v) w.str(g.encode());
}

inline std::vector<BasicGraph> get_basics(Reader& r) {
    auto n = r.pod<std::uint64_t>();
    std::vector<BasicGraph> v;
    for (std::uint64_t i = 0; i < n; ++i) {
        try {
            v.push_back(BasicGraph::decode(r.str()));
        } catch (const InvalidArgument& e) {
            throw ImageError(e.what());
        }
    }
    return v;
}

}  // namespace detail

inline void save_image(std::ostream& out, const ConnectivityOracle& o) {
    detail::Writer w;
    const Graph& g = o.graph();
    w.pod<std::int32_t>(o.k());
    w.pod<std::int32_t>(o.q());
    w.pod<std::uint8_t>(o.mode() == Mode::Strong ? 0 : 1);
    w.pod<std::uint8_t>(o.certified());
    w.pod<std::uint8_t>(o.certification_ran());
    w.pod<std::int32_t>(g.vertex_count());
    std::vector<Vertex> ends;
    for (auto [u, v] : g.edges()) ends.push_back(u), ends.push_back(v);
    w.vec(ends);
    const auto& d = o.decomposition();
    w.pod<std::int32_t>(d.root);
    w.vec(d.parent);
    std::vector<std::uint32_t> sizes;
    std::vector<Vertex> flat;
    for (const auto& b : d.bags) {
        sizes.push_back(static_cast<std::uint32_t>(b.size()));
        flat.insert(flat.end(), b.begin(), b.end());
    }
    w.vec(sizes);
    w.vec(flat);
    const auto& t = o.torso_index();
    w.pod<std::uint8_t>(t.backend() == TorsoBackend::Trivial ? 0 : 1);
    w.pod<std::int32_t>(t.q());
    w.pod<std::int32_t>(t.coloring().arity);
    w.vec(t.coloring().color);
    w.vec(t.edge_label_ids());
    if (t.backend() == TorsoBackend::Trivial) {
        detail::put_basics(w, t.trivial_basics());
        w.vec(t.trivial_table());
        w.vec(t.trivial_rows());
    } else {
        detail::put_basics(w, t.semigroup().elements());
        w.vec(t.semigroup().generators());
        w.vec(t.semigroup().right_table());
        w.vec(t.semigroup_labels());
    }
    out.write(kImageMagic, sizeof(kImageMagic));
    const std::uint32_t version = kImageVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint64_t size = w.data().size(), sum = detail::fnv1a(w.data());
    out.write(reinterpret_cast<const char*>(&size), sizeof(size));
    out.write(w.data().data(), static_cast<std::streamsize>(size));
    out.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
    if (!out) throw ImageError("writing the image failed");
}

inline std::unique_ptr<ConnectivityOracle> load_image(std::istream& in) {
    char magic[sizeof(kImageMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kImageMagic, sizeof(magic)) != 0)
        throw ImageError("not an oracle image");
    std::uint32_t version = 0;
    if (!in.read(reinterpret_cast<char*>(&version), sizeof(version))) throw ImageError("image truncated");
    if (version != kImageVersion) throw ImageError("unsupported image version " + std::to_string(version));
    std::uint64_t size = 0, sum = 0;
    if (!in.read(reinterpret_cast<char*>(&size), sizeof(size))) throw ImageError("image truncated");
    if (size > (std::uint64_t{1} << 40)) throw ImageError("implausible image size");
    std::string payload(size, '\0');
    if (!in.read(payload.data(), static_cast<std::streamsize>(size)) ||
        !in.read(reinterpret_cast<char*>(&sum), sizeof(sum)))
        throw ImageError("image truncated");
    if (detail::fnv1a(payload) != sum) throw ImageError("image checksum mismatch");

    detail::Reader r(payload);
    const int k = r.pod<std::int32_t>();
    const int q = r.pod<std::int32_t>();
    const Mode mode = r.pod<std::uint8_t>() == 0 ? Mode::Strong : Mode::Weak;
    const bool certified = r.pod<std::uint8_t>();
    const bool ran = r.pod<std::uint8_t>();
    const int n = r.pod<std::int32_t>();
    auto ends = r.vec<Vertex>();
    if (n < 0 || ends.size() % 2) throw ImageError("corrupt graph section");
    std::vector<Edge> es;
    for (std::size_t i = 0; i < ends.size(); i += 2) es.emplace_back(ends[i], ends[i + 1]);
    TreeDecomposition d;
    d.root = r.pod<std::int32_t>();
    d.parent = r.vec<NodeId>();
    auto sizes = r.vec<std::uint32_t>();
    auto flat = r.vec<Vertex>();
    if (sizes.size() != d.parent.size()) throw ImageError("corrupt decomposition section");
    std::size_t at = 0;
    for (auto s : sizes) {
        if (at + s > flat.size()) throw ImageError("corrupt decomposition section");
        d.bags.emplace_back(flat.begin() + at, flat.begin() + at + s);
        at += s;
    }
    TorsoIndex::Parts p;
    p.backend = r.pod<std::uint8_t>() == 0 ? TorsoBackend::Trivial : TorsoBackend::Semigroup;
    p.q = r.pod<std::int32_t>();
    p.coloring.arity = r.pod<std::int32_t>();
    p.coloring.color = r.vec<std::uint8_t>();
    p.edge_label_id = r.vec<std::uint32_t>();
    if (p.backend == TorsoBackend::Trivial) {
        p.basics = detail::get_basics(r);
        p.table = r.vec<std::uint32_t>();
        p.rows = r.vec<std::uint64_t>();
    } else {
        p.elements = detail::get_basics(r);
        p.gens = r.vec<std::uint32_t>();
        p.right = r.vec<std::uint32_t>();
        p.labels = r.vec<std::uint32_t>();
    }
    if (!r.done()) throw ImageError("trailing bytes in image");
    try {
        Graph g = Graph::from_edges(n, es);
        require_valid(g, d);
        return ConnectivityOracle::from_parts(std::move(g), std::move(d), k, q, mode, certified, ran, std::move(p));
    } catch (const ImageError&) {
        throw;
    } catch (const Error& e) {
        throw ImageError(std::string("inconsistent image: ") + e.what());
    }
}

inline void save_image_file(const std::string& path, const ConnectivityOracle& o) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageError("cannot open " + path + " for writing");
    save_image(out, o);
}

inline std::unique_ptr<ConnectivityOracle> load_image_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError("cannot open " + path);
    return load_image(in);
}

inline std::size_t image_size(const ConnectivityOracle& o) {
    std::ostringstream out;
    save_image(out, o);
    return out.str().size();
}

}  // namespace cutl
