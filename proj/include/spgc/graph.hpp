#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spgc/error.hpp"

namespace spgc {

/// Node category index in [0, n_V).
using NodeType = std::uint32_t;

/// One undirected typed edge, stored lower-triangle normalized: src > dst.
struct EdgeRecord {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t etype = 0;

    friend bool operator==(const EdgeRecord& a, const EdgeRecord& b) {
        return a.src == b.src && a.dst == b.dst && a.etype == b.etype;
    }
};

/// Node-type list plus edge triples. Node indices are implicit: the node at
/// position i has index i. Immutable by convention once built; all
/// operations below are pure functions.
struct SparseGraph {
    std::vector<NodeType> nodes;
    std::vector<EdgeRecord> edges;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }

    friend bool operator==(const SparseGraph& a, const SparseGraph& b) {
        return a.nodes == b.nodes && a.edges == b.edges;
    }
};

/// Node-type vector plus a symmetric categorical adjacency matrix where
/// category 0 encodes "no edge" (so n_A = n_E + 1).
struct DenseGraph {
    std::vector<std::uint32_t> xs;
    std::vector<std::uint32_t> adj; // n*n, row-major

    std::size_t node_count() const { return xs.size(); }
    std::uint32_t at(std::size_t i, std::size_t j) const { return adj[i * xs.size() + j]; }
    std::uint32_t& at(std::size_t i, std::size_t j) { return adj[i * xs.size() + j]; }

    friend bool operator==(const DenseGraph& a, const DenseGraph& b) {
        return a.xs == b.xs && a.adj == b.adj;
    }
};

/// Bijection on [0, n) in gather form: position i of the permuted object is
/// taken from position map[i] of the original.
struct Permutation {
    std::vector<std::uint32_t> map;

    static Permutation identity(std::size_t n) {
        Permutation p;
        p.map.resize(n);
        std::iota(p.map.begin(), p.map.end(), 0u);
        return p;
    }

    std::size_t size() const { return map.size(); }
    std::uint32_t operator()(std::size_t i) const { return map[i]; }

    Permutation inverse() const {
        Permutation inv;
        inv.map.assign(map.size(), 0);
        for (std::size_t i = 0; i < map.size(); ++i) inv.map[map[i]] = static_cast<std::uint32_t>(i);
        return inv;
    }

    void validate() const {
        std::vector<bool> seen(map.size(), false);
        for (std::uint32_t v : map) {
            if (v >= map.size() || seen[v]) raise(ErrorKind::data, "permutation is not a bijection");
            seen[v] = true;
        }
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.map == b.map; }
};

/// Dataset-wide bounds and category counts.
struct DatasetSchema {
    std::uint32_t n_max = 1;
    std::uint32_t m_max = 0;
    std::uint32_t n_V = 1;
    std::uint32_t n_E = 1;

    void validate() const {
        if (n_max < 1 || n_V < 1 || n_E < 1) raise(ErrorKind::config, "schema requires n_max >= 1, n_V >= 1, n_E >= 1");
    }

    friend bool operator==(const DatasetSchema& a, const DatasetSchema& b) {
        return a.n_max == b.n_max && a.m_max == b.m_max && a.n_V == b.n_V && a.n_E == b.n_E;
    }
};

inline void validate_graph(const SparseGraph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) raise(ErrorKind::data, "graph must have at least one node");
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (const EdgeRecord& e : g.edges) {
        if (e.src >= n || e.dst >= n) raise(ErrorKind::data, "edge endpoint out of range");
        if (e.src == e.dst) raise(ErrorKind::data, "self-loops are not allowed");
        if (e.src < e.dst) raise(ErrorKind::data, "edge not normalized: expected src > dst");
        if (!pairs.emplace(e.src, e.dst).second) raise(ErrorKind::data, "duplicate edge");
    }
}

inline void validate_graph(const SparseGraph& g, const DatasetSchema& schema) {
    validate_graph(g);
    if (g.node_count() > schema.n_max) raise(ErrorKind::data, "graph exceeds schema n_max");
    if (g.edge_count() > schema.m_max) raise(ErrorKind::data, "graph exceeds schema m_max");
    for (NodeType t : g.nodes)
        if (t >= schema.n_V) raise(ErrorKind::data, "node type out of schema range");
    for (const EdgeRecord& e : g.edges)
        if (e.etype >= schema.n_E) raise(ErrorKind::data, "edge type out of schema range");
}

inline DenseGraph to_dense(const SparseGraph& g) {
    const std::size_t n = g.node_count();
    DenseGraph d;
    d.xs = g.nodes;
    d.adj.assign(n * n, 0);
    for (const EdgeRecord& e : g.edges) {
        d.at(e.src, e.dst) = e.etype + 1;
        d.at(e.dst, e.src) = e.etype + 1;
    }
    return d;
}

/// Lower-triangle extraction in row-major order (i ascending, j < i
/// ascending). This traversal defines the normative edge ordering.
inline SparseGraph to_sparse(const DenseGraph& d) {
    const std::size_t n = d.node_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (d.at(i, i) != 0) raise(ErrorKind::data, "dense adjacency has nonzero diagonal");
        for (std::size_t j = 0; j < i; ++j)
            if (d.at(i, j) != d.at(j, i)) raise(ErrorKind::data, "dense adjacency is not symmetric");
    }
    SparseGraph g;
    g.nodes = d.xs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::uint32_t a = d.at(i, j); a != 0)
                g.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), a - 1});
    return g;
}

inline DenseGraph permute_dense(const DenseGraph& d, const Permutation& p) {
    const std::size_t n = d.node_count();
    if (p.size() != n) raise(ErrorKind::data, "permutation size does not match graph");
    DenseGraph out;
    out.xs.resize(n);
    out.adj.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) out.xs[i] = d.xs[p(i)];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = d.at(p(i), p(j));
    return out;
}

/// Relabel nodes by p. Result equals to_sparse(permute_dense(to_dense(g), p))
/// without materializing the matrix: endpoints are mapped through p^-1,
/// renormalized, and the records re-sorted row-major.
inline SparseGraph permute_sparse(const SparseGraph& g, const Permutation& p) {
    if (p.size() != g.node_count()) raise(ErrorKind::data, "permutation size does not match graph");
    const Permutation inv = p.inverse();
    SparseGraph out;
    out.nodes.resize(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) out.nodes[i] = g.nodes[p(i)];
    out.edges.reserve(g.edge_count());
    for (const EdgeRecord& e : g.edges) {
        std::uint32_t a = inv(e.src), b = inv(e.dst);
        if (a < b) std::swap(a, b);
        out.edges.push_back({a, b, e.etype});
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
        return x.src != y.src ? x.src < y.src : x.dst < y.dst;
    });
    return out;
}

/// The edge permutation induced by a node permutation: position j of
/// permute_sparse(g, p).edges holds the relabeled original edge
/// result.map[j]. Recovered by re-extracting the permuted lower triangle in
/// row-major order and aligning it with the original list.
inline Permutation induced_edge_permutation(const Permutation& p, const SparseGraph& g) {
    if (p.size() != g.node_count()) raise(ErrorKind::data, "permutation size does not match graph");
    const Permutation inv = p.inverse();
    struct Tagged {
        std::uint32_t src, dst, orig;
    };
    std::vector<Tagged> tagged;
    tagged.reserve(g.edge_count());
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        std::uint32_t a = inv(g.edges[i].src), b = inv(g.edges[i].dst);
        if (a < b) std::swap(a, b);
        tagged.push_back({a, b, static_cast<std::uint32_t>(i)});
    }
    std::sort(tagged.begin(), tagged.end(), [](const Tagged& x, const Tagged& y) {
        return x.src != y.src ? x.src < y.src : x.dst < y.dst;
    });
    Permutation pe;
    pe.map.reserve(tagged.size());
    for (const Tagged& t : tagged) pe.map.push_back(t.orig);
    return pe;
}

} // namespace spgc
