#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spgc/circuit.hpp"
#include "spgc/graph.hpp"
#include "spgc/numeric.hpp"

namespace spgc {

/// Flattened variable layout of the sparse model: n_max node-type slots
/// followed by per-edge triples (src_j, dst_j, etype_j). Endpoint slots range
/// over [0, n_max), so D = n_max + 3 m_max. Grouping for the region graphs:
/// group 0 = node types, group 1 = edge endpoints, group 2 = edge types.
struct VariableLayout {
    DatasetSchema schema;

    std::uint32_t var_count() const { return schema.n_max + 3 * schema.m_max; }
    std::uint32_t node_var(std::uint32_t i) const { return i; }
    std::uint32_t src_var(std::uint32_t j) const { return schema.n_max + 3 * j; }
    std::uint32_t dst_var(std::uint32_t j) const { return schema.n_max + 3 * j + 1; }
    std::uint32_t etype_var(std::uint32_t j) const { return schema.n_max + 3 * j + 2; }

    std::vector<std::vector<VariableId>> groups() const {
        std::vector<std::vector<VariableId>> g(3);
        for (std::uint32_t i = 0; i < schema.n_max; ++i) g[0].push_back({node_var(i), schema.n_V});
        for (std::uint32_t j = 0; j < schema.m_max; ++j) {
            g[1].push_back({src_var(j), schema.n_max});
            g[1].push_back({dst_var(j), schema.n_max});
            g[2].push_back({etype_var(j), schema.n_E});
        }
        return g;
    }
};

/// Dense-baseline layout: n_max node slots (domain n_V) plus one slot per
/// lower-triangle pair (i, j), i > j, with domain n_A = n_E + 1 where
/// category 0 means "no edge". D = n_max + n_max (n_max - 1) / 2.
struct DenseBaselineLayout {
    DatasetSchema schema;

    std::uint32_t pair_count() const { return schema.n_max * (schema.n_max - 1) / 2; }
    std::uint32_t var_count() const { return schema.n_max + pair_count(); }
    std::uint32_t node_var(std::uint32_t i) const { return i; }
    // row-major lower-triangle position of pair (i, j), i > j
    std::uint32_t pair_var(std::uint32_t i, std::uint32_t j) const { return schema.n_max + i * (i - 1) / 2 + j; }

    std::vector<std::vector<VariableId>> groups() const {
        std::vector<std::vector<VariableId>> g(2);
        for (std::uint32_t i = 0; i < schema.n_max; ++i) g[0].push_back({node_var(i), schema.n_V});
        for (std::uint32_t i = 1; i < schema.n_max; ++i)
            for (std::uint32_t j = 0; j < i; ++j) g[1].push_back({pair_var(i, j), schema.n_E + 1});
        return g;
    }
};

/// Joint distribution over (N, M) with support {1..n_max} x {0..m_max},
/// stored as log-probabilities (row n-1, column m; -inf outside the fitted
/// support). M = 0 is included so edgeless graphs have mass.
struct CardinalityTable {
    std::uint32_t n_max = 1;
    std::uint32_t m_max = 0;
    std::vector<double> log_probs; // n_max * (m_max + 1)

    double& at(std::uint32_t n, std::uint32_t m) { return log_probs[(n - 1) * (m_max + 1) + m]; }
    double at(std::uint32_t n, std::uint32_t m) const { return log_probs[(n - 1) * (m_max + 1) + m]; }

    /// log of the total mass over n >= k, m >= l. Full support returns 0.0
    /// exactly (a normalized table has mass one by definition).
    double log_tail_mass(std::uint32_t k, std::uint32_t l) const {
        if (k <= 1 && l == 0) return 0.0;
        double acc = kNegInf;
        for (std::uint32_t n = std::max(k, 1u); n <= n_max; ++n)
            for (std::uint32_t m = l; m <= m_max; ++m) acc = log_add(acc, at(n, m));
        return acc;
    }

    void validate() const {
        double total = log_sum_exp(log_probs);
        if (std::abs(std::exp(total) - 1.0) > 1e-9) raise(ErrorKind::numeric, "cardinality table is not normalized");
    }
};

/// Empirical maximum-likelihood fit of p(N, M), with optional additive
/// smoothing alpha over the bounding rectangle of the observed support.
inline CardinalityTable fit_cardinality(std::span<const SparseGraph> dataset, const DatasetSchema& schema,
                                        double alpha = 0.0) {
    if (dataset.empty()) raise(ErrorKind::data, "cannot fit cardinality table on an empty dataset");
    CardinalityTable t;
    t.n_max = schema.n_max;
    t.m_max = schema.m_max;
    std::vector<double> counts(schema.n_max * (schema.m_max + 1), 0.0);
    std::uint32_t lo_n = schema.n_max, hi_n = 1, lo_m = schema.m_max, hi_m = 0;
    for (const SparseGraph& g : dataset) {
        const std::uint32_t n = static_cast<std::uint32_t>(g.node_count());
        const std::uint32_t m = static_cast<std::uint32_t>(g.edge_count());
        if (n < 1 || n > schema.n_max || m > schema.m_max) raise(ErrorKind::data, "graph outside schema bounds");
        counts[(n - 1) * (schema.m_max + 1) + m] += 1.0;
        lo_n = std::min(lo_n, n);
        hi_n = std::max(hi_n, n);
        lo_m = std::min(lo_m, m);
        hi_m = std::max(hi_m, m);
    }
    if (alpha > 0.0)
        for (std::uint32_t n = lo_n; n <= hi_n; ++n)
            for (std::uint32_t m = lo_m; m <= hi_m; ++m) counts[(n - 1) * (schema.m_max + 1) + m] += alpha;
    double total = 0.0;
    for (double v : counts) total += v;
    t.log_probs.assign(counts.size(), kNegInf);
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0.0) t.log_probs[i] = std::log(counts[i] / total);
    return t;
}

/// Marginalization padding for the sparse layout: slots of the first n nodes
/// and m edges are observed, every other slot stays marginalized. Expects
/// the caller to have canonicalized g.
inline Evidence graph_to_evidence(const VariableLayout& layout, const SparseGraph& g) {
    validate_graph(g, layout.schema);
    Evidence e(layout.var_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        e.observe(layout.node_var(i), static_cast<std::int32_t>(g.nodes[i]));
    for (std::uint32_t j = 0; j < g.edge_count(); ++j) {
        e.observe(layout.src_var(j), static_cast<std::int32_t>(g.edges[j].src));
        e.observe(layout.dst_var(j), static_cast<std::int32_t>(g.edges[j].dst));
        e.observe(layout.etype_var(j), static_cast<std::int32_t>(g.edges[j].etype));
    }
    return e;
}

/// Dense analogue: node slots below n and all pair slots within [0, n)^2 are
/// observed (0 = no edge), everything touching a padded node is marginalized.
inline Evidence graph_to_evidence(const DenseBaselineLayout& layout, const SparseGraph& g) {
    validate_graph(g, layout.schema);
    const std::uint32_t n = static_cast<std::uint32_t>(g.node_count());
    Evidence e(layout.var_count());
    for (std::uint32_t i = 0; i < n; ++i) e.observe(layout.node_var(i), static_cast<std::int32_t>(g.nodes[i]));
    for (std::uint32_t i = 1; i < n; ++i)
        for (std::uint32_t j = 0; j < i; ++j) e.observe(layout.pair_var(i, j), 0);
    for (const EdgeRecord& ed : g.edges)
        e.observe(layout.pair_var(ed.src, ed.dst), static_cast<std::int32_t>(ed.etype + 1));
    return e;
}

} // namespace spgc
