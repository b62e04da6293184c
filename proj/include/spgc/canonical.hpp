#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "spgc/graph.hpp"

namespace spgc {

namespace detail {

struct CanonWork {
    std::size_t n = 0;
    // adjacency as (neighbor, etype) lists
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj;
};

/// One pass of color refinement: the new color of a node is the dense rank
/// of (old color, sorted multiset of (etype, neighbor color)). Iterates to a
/// fixed point of the partition.
inline std::vector<std::uint32_t> refine_colors(const CanonWork& w, std::vector<std::uint32_t> colors) {
    using Signature = std::pair<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>;
    std::size_t classes = 0;
    {
        // densify the incoming coloring so the class count is exact
        std::map<std::uint32_t, std::uint32_t> rank;
        for (std::uint32_t c : colors) rank.emplace(c, 0);
        std::uint32_t next = 0;
        for (auto& kv : rank) kv.second = next++;
        for (std::uint32_t& c : colors) c = rank.at(c);
        classes = next;
    }
    for (;;) {
        std::vector<Signature> sigs(w.n);
        for (std::size_t v = 0; v < w.n; ++v) {
            sigs[v].first = colors[v];
            auto& neigh = sigs[v].second;
            neigh.reserve(w.adj[v].size());
            for (auto [u, t] : w.adj[v]) neigh.emplace_back(t, colors[u]);
            std::sort(neigh.begin(), neigh.end());
        }
        std::map<Signature, std::uint32_t> rank;
        for (const Signature& s : sigs) rank.emplace(s, 0);
        std::uint32_t next = 0;
        for (auto& kv : rank) kv.second = next++;
        std::vector<std::uint32_t> refined(w.n);
        for (std::size_t v = 0; v < w.n; ++v) refined[v] = rank.at(sigs[v]);
        if (next == classes) return refined; // partition stable (ranks consistent with previous classes)
        classes = next;
        colors = std::move(refined);
    }
}

/// Serialization used to compare candidate canonical forms: node types in
/// order followed by row-major edges with types. Lexicographic order on this
/// vector totally orders candidate forms.
inline std::vector<std::uint64_t> serialize_form(const SparseGraph& g) {
    std::vector<std::uint64_t> out;
    out.reserve(1 + g.node_count() + 3 * g.edge_count());
    out.push_back(g.node_count());
    for (NodeType t : g.nodes) out.push_back(t);
    for (const EdgeRecord& e : g.edges) {
        out.push_back(e.src);
        out.push_back(e.dst);
        out.push_back(e.etype);
    }
    return out;
}

struct CanonBest {
    std::vector<std::uint64_t> key;
    SparseGraph graph;
    Permutation perm;
    bool set = false;
};

inline Permutation order_from_colors(const std::vector<std::uint32_t>& colors) {
    // all colors distinct: canonical position = color rank
    Permutation p;
    p.map.assign(colors.size(), 0);
    for (std::size_t v = 0; v < colors.size(); ++v) p.map[colors[v]] = static_cast<std::uint32_t>(v);
    return p;
}

inline void canon_search(const SparseGraph& g, const CanonWork& w, std::vector<std::uint32_t> colors,
                         CanonBest& best) {
    colors = refine_colors(w, std::move(colors));
    // find the first (lowest-color) class with more than one member
    std::vector<std::uint32_t> count(w.n, 0);
    for (std::uint32_t c : colors) ++count[c];
    std::optional<std::uint32_t> branch_color;
    for (std::uint32_t c = 0; c < w.n; ++c) {
        if (count[c] > 1) {
            branch_color = c;
            break;
        }
    }
    if (!branch_color) {
        Permutation p = order_from_colors(colors);
        SparseGraph form = permute_sparse(g, p);
        std::vector<std::uint64_t> key = serialize_form(form);
        if (!best.set || key < best.key) {
            best.key = std::move(key);
            best.graph = std::move(form);
            best.perm = std::move(p);
            best.set = true;
        }
        return;
    }
    // individualize every member of the tied class in turn
    for (std::size_t v = 0; v < w.n; ++v) {
        if (colors[v] != *branch_color) continue;
        std::vector<std::uint32_t> split(w.n);
        for (std::size_t u = 0; u < w.n; ++u) {
            split[u] = 2 * colors[u] + (colors[u] == *branch_color && u != v ? 1 : 0);
        }
        canon_search(g, w, std::move(split), best);
    }
}

} // namespace detail

/// Deterministic canonical labeling: iterative color refinement seeded by
/// (node type, degree), then exhaustive tie-breaking over tied color classes,
/// keeping the lexicographically smallest serialized form. Stable under
/// relabeling: canonicalize(permute_sparse(g, p)).graph == canonicalize(g).graph.
/// Exponential only on highly symmetric graphs; fine at molecular sizes.
struct CanonicalResult {
    SparseGraph graph;
    Permutation perm; // permute_sparse(input, perm) == graph
};

inline CanonicalResult canonicalize(const SparseGraph& g) {
    validate_graph(g);
    detail::CanonWork w;
    w.n = g.node_count();
    w.adj.resize(w.n);
    for (const EdgeRecord& e : g.edges) {
        w.adj[e.src].emplace_back(e.dst, e.etype);
        w.adj[e.dst].emplace_back(e.src, e.etype);
    }
    // initial colors: dense rank of (type, degree)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> seed(w.n);
    for (std::size_t v = 0; v < w.n; ++v) seed[v] = {g.nodes[v], static_cast<std::uint32_t>(w.adj[v].size())};
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> rank;
    for (auto& s : seed) rank.emplace(s, 0);
    std::uint32_t next = 0;
    for (auto& kv : rank) kv.second = next++;
    std::vector<std::uint32_t> colors(w.n);
    for (std::size_t v = 0; v < w.n; ++v) colors[v] = rank.at(seed[v]);

    detail::CanonBest best;
    detail::canon_search(g, w, std::move(colors), best);
    return {std::move(best.graph), std::move(best.perm)};
}

} // namespace spgc
