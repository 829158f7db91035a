#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "coevo/errors.hpp"

namespace coevo {

/// Parent-array tree, vertices indexed by arrival order. The single mutable
/// artifact of all simulators; everything else reads it.
struct TreeState {
    static constexpr std::uint64_t kRoot = ~0ull;

    std::vector<std::uint64_t> parent;  // parent[0] = kRoot
    std::vector<std::uint32_t> depth;   // depth[0] = 0
    std::vector<double> birth_time;     // empty, or one entry per vertex
    std::uint64_t seed = 0;             // provenance
    std::string provenance;             // config echo

    std::uint64_t n() const { return parent.size(); }
    bool has_birth_times() const { return !birth_time.empty(); }

    void validate() const {
        if (parent.empty()) throw InvariantViolation("tree: empty");
        if (parent[0] != kRoot) throw InvariantViolation("tree: parent[0] != ROOT");
        if (depth.size() != parent.size())
            throw InvariantViolation("tree: depth size mismatch");
        if (depth[0] != 0) throw InvariantViolation("tree: depth[0] != 0");
        for (std::uint64_t v = 1; v < n(); ++v) {
            if (parent[v] >= v)
                throw InvariantViolation("tree: parent[" + std::to_string(v) +
                                         "] not earlier than vertex");
            if (depth[v] != depth[parent[v]] + 1)
                throw InvariantViolation("tree: depth[" + std::to_string(v) +
                                         "] != depth[parent] + 1");
        }
        if (!birth_time.empty()) {
            if (birth_time.size() != parent.size())
                throw InvariantViolation("tree: birth_time size mismatch");
            for (std::uint64_t v = 1; v < n(); ++v)
                if (!(birth_time[v] > birth_time[v - 1]))
                    throw InvariantViolation("tree: birth times not increasing");
        }
    }
};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw TruncatedFile("tree file ends mid-field");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

inline double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace detail

// Binary layout (bit-exact):
//   "COEV" | version 0x01 | flags (bit0 = birth times) | u64 n (LE)
//   | n x u64 parents (root = 0xFFFFFFFFFFFFFFFF) | [n x f64 birth times]
inline void save_tree_binary(const TreeState& t, std::ostream& os) {
    os.write("COEV", 4);
    const unsigned char version = 0x01;
    const unsigned char flags = t.has_birth_times() ? 0x01 : 0x00;
    os.put(static_cast<char>(version));
    os.put(static_cast<char>(flags));
    detail::put_u64(os, t.n());
    for (std::uint64_t p : t.parent) detail::put_u64(os, p);
    if (t.has_birth_times())
        for (double b : t.birth_time) detail::put_f64(os, b);
}

inline void save_tree_binary(const TreeState& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    save_tree_binary(t, os);
    if (!os) throw Error("write failure on " + path);
}

inline TreeState load_tree_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "COEV", 4) != 0)
        throw BadMagic("not a COEV tree stream");
    const int version = is.get();
    const int flags = is.get();
    if (version != 0x01) throw BadMagic("unsupported COEV version");
    if (flags < 0) throw TruncatedFile("tree file ends in header");
    const std::uint64_t n = detail::get_u64(is);
    TreeState t;
    t.parent.resize(n);
    t.depth.resize(n);
    for (std::uint64_t v = 0; v < n; ++v) t.parent[v] = detail::get_u64(is);
    if (flags & 0x01) {
        t.birth_time.resize(n);
        for (std::uint64_t v = 0; v < n; ++v) t.birth_time[v] = detail::get_f64(is);
    }
    // Depths are derivable; rebuild then revalidate everything.
    if (n > 0) {
        t.depth[0] = 0;
        for (std::uint64_t v = 1; v < n; ++v) {
            if (t.parent[v] >= v)
                throw InvariantViolation("tree file: parent[" + std::to_string(v) +
                                         "] >= vertex index");
            t.depth[v] = t.depth[t.parent[v]] + 1;
        }
    }
    t.validate();
    return t;
}

inline TreeState load_tree_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return load_tree_binary(is);
}

/// Text alternative: one "index\tparent\tdepth" line per vertex, root parent -1.
inline void save_tree_tsv(const TreeState& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    for (std::uint64_t v = 0; v < t.n(); ++v) {
        if (v == 0)
            os << 0 << "\t" << -1 << "\t" << 0 << "\n";
        else
            os << v << "\t" << t.parent[v] << "\t" << t.depth[v] << "\n";
    }
}

}  // namespace coevo
