#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spgc/canonical.hpp"
#include "spgc/circuit.hpp"
#include "spgc/circuit_build.hpp"
#include "spgc/graph.hpp"
#include "spgc/layout.hpp"

namespace spgc {

/// Per-group region settings plus the shared knobs, mirroring the config
/// file. The sparse model has three groups (node types, edge endpoints, edge
/// types); the dense baseline reuses node_type for its node slots and
/// edge_type for its pair slots.
struct ModelConfig {
    RegionGraphSpec::Kind kind = RegionGraphSpec::Kind::BT;
    std::uint32_t n_c = 16;
    std::uint32_t n_R = 1;
    std::uint64_t seed = 1;
    struct Group {
        std::uint32_t n_L = 2, n_S = 8, n_I = 8;
    };
    Group node_type;
    Group edge_index;
    Group edge_type;

    RegionGraphSpec spec_for(const Group& g) const {
        RegionGraphSpec s;
        s.kind = kind;
        s.n_L = g.n_L;
        s.n_S = g.n_S;
        s.n_I = g.n_I;
        s.n_R = n_R;
        s.n_c = n_c;
        s.rng_seed = seed;
        return s;
    }
};

/// Eq.-style factorization: a padded circuit for the (n, m)-conditioned part
/// and a joint cardinality table. `atoms` is set for molecule schemas and
/// maps node categories to atom symbols.
struct SpgcModel {
    DatasetSchema schema;
    VariableLayout layout;
    ModelConfig config;
    Circuit circuit;
    CardinalityTable cardinality;
    std::vector<std::string> atoms;

    bool molecule_schema() const { return !atoms.empty(); }
};

struct DenseModel {
    DatasetSchema schema;
    DenseBaselineLayout layout;
    ModelConfig config;
    Circuit circuit;
    CardinalityTable cardinality; // m dimension unused: p(N) with m = 0
};

inline SpgcModel build_spgc_model(const DatasetSchema& schema, const ModelConfig& cfg) {
    schema.validate();
    SpgcModel m;
    m.schema = schema;
    m.layout.schema = schema;
    m.config = cfg;
    std::vector<RegionGraphSpec> specs{cfg.spec_for(cfg.node_type), cfg.spec_for(cfg.edge_index),
                                       cfg.spec_for(cfg.edge_type)};
    m.circuit = build_grouped_circuit(specs, m.layout.groups());
    m.cardinality.n_max = schema.n_max;
    m.cardinality.m_max = schema.m_max;
    m.cardinality.log_probs.assign(schema.n_max * (schema.m_max + 1), kNegInf);
    return m;
}

inline DenseModel build_dense_baseline(const DatasetSchema& schema, const ModelConfig& cfg) {
    schema.validate();
    DenseModel m;
    m.schema = schema;
    m.layout.schema = schema;
    m.config = cfg;
    std::vector<RegionGraphSpec> specs{cfg.spec_for(cfg.node_type), cfg.spec_for(cfg.edge_type)};
    m.circuit = build_grouped_circuit(specs, m.layout.groups());
    m.cardinality.n_max = schema.n_max;
    m.cardinality.m_max = 0;
    m.cardinality.log_probs.assign(schema.n_max, kNegInf);
    return m;
}

/// log p(g) = log p(sort(g) | n, m) + log p(n, m). The graph is sorted into
/// its canonical order first, which makes the result permutation-invariant
/// (and a lower bound on the order-marginalized likelihood). A cardinality
/// cell with zero mass yields -inf, which is a valid result.
inline double log_prob(const SpgcModel& model, const SparseGraph& g, EvalWorkspace& ws) {
    validate_graph(g, model.schema);
    const SparseGraph canon = canonicalize(g).graph;
    const double lc = model.cardinality.at(static_cast<std::uint32_t>(canon.node_count()),
                                           static_cast<std::uint32_t>(canon.edge_count()));
    if (lc == kNegInf) return kNegInf;
    return evaluate(model.circuit, graph_to_evidence(model.layout, canon), ws) + lc;
}

inline double log_prob(const SpgcModel& model, const SparseGraph& g) {
    EvalWorkspace ws;
    return log_prob(model, g, ws);
}

inline double log_prob(const DenseModel& model, const SparseGraph& g, EvalWorkspace& ws) {
    validate_graph(g, model.schema);
    const SparseGraph canon = canonicalize(g).graph;
    const double lc = model.cardinality.at(static_cast<std::uint32_t>(canon.node_count()), 0);
    if (lc == kNegInf) return kNegInf;
    return evaluate(model.circuit, graph_to_evidence(model.layout, canon), ws) + lc;
}

inline double log_prob(const DenseModel& model, const SparseGraph& g) {
    EvalWorkspace ws;
    return log_prob(model, g, ws);
}

/// A subgraph observed in the leading slots: k node types and l full edge
/// triples whose endpoints lie within the k observed nodes.
struct SubstructureEvidence {
    std::vector<NodeType> nodes;
    std::vector<EdgeRecord> edges;

    std::uint32_t k() const { return static_cast<std::uint32_t>(nodes.size()); }
    std::uint32_t l() const { return static_cast<std::uint32_t>(edges.size()); }

    static SubstructureEvidence from_graph(const SparseGraph& g) { return {g.nodes, g.edges}; }

    void validate(const DatasetSchema& schema) const {
        if (nodes.size() > schema.n_max || edges.size() > schema.m_max)
            raise(ErrorKind::data, "substructure exceeds schema bounds");
        std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (const EdgeRecord& e : edges) {
            if (e.src >= nodes.size() || e.dst >= nodes.size())
                raise(ErrorKind::data, "substructure edge references an unobserved node");
            if (e.src <= e.dst) raise(ErrorKind::data, "substructure edge not normalized (src > dst)");
            if (!pairs.emplace(e.src, e.dst).second) raise(ErrorKind::data, "duplicate substructure edge");
            if (e.etype >= schema.n_E) raise(ErrorKind::data, "substructure edge type out of range");
        }
        for (NodeType t : nodes)
            if (t >= schema.n_V) raise(ErrorKind::data, "substructure node type out of range");
    }
};

inline Evidence substructure_to_evidence(const VariableLayout& layout, const SubstructureEvidence& sub) {
    Evidence e(layout.var_count());
    for (std::uint32_t i = 0; i < sub.k(); ++i) e.observe(layout.node_var(i), static_cast<std::int32_t>(sub.nodes[i]));
    for (std::uint32_t j = 0; j < sub.l(); ++j) {
        e.observe(layout.src_var(j), static_cast<std::int32_t>(sub.edges[j].src));
        e.observe(layout.dst_var(j), static_cast<std::int32_t>(sub.edges[j].dst));
        e.observe(layout.etype_var(j), static_cast<std::int32_t>(sub.edges[j].etype));
    }
    return e;
}

/// Exact log-marginal of observing `sub` in the leading slots of a graph of
/// unknown size. Under marginalization padding the circuit value is the same
/// for every (n, m) >= (k, l) - free and padded slots are marginalized
/// alike - so the double sum over cardinalities collapses to a single
/// circuit call times the cardinality tail mass.
inline double log_marginal(const SpgcModel& model, const SubstructureEvidence& sub, EvalWorkspace& ws) {
    sub.validate(model.schema);
    const double tail = model.cardinality.log_tail_mass(sub.k(), sub.l());
    if (tail == kNegInf) return kNegInf;
    return evaluate(model.circuit, substructure_to_evidence(model.layout, sub), ws) + tail;
}

inline double log_marginal(const SpgcModel& model, const SubstructureEvidence& sub) {
    EvalWorkspace ws;
    return log_marginal(model, sub, ws);
}

/// Dense analogue: the k observed nodes pin their k x k pair block (absent
/// pairs observed as category 0); the tail runs over n >= k.
inline double log_marginal(const DenseModel& model, const SubstructureEvidence& sub, EvalWorkspace& ws) {
    sub.validate(model.schema);
    const std::uint32_t k = sub.k();
    Evidence e(model.layout.var_count());
    for (std::uint32_t i = 0; i < k; ++i) e.observe(model.layout.node_var(i), static_cast<std::int32_t>(sub.nodes[i]));
    for (std::uint32_t i = 1; i < k; ++i)
        for (std::uint32_t j = 0; j < i; ++j) e.observe(model.layout.pair_var(i, j), 0);
    for (const EdgeRecord& ed : sub.edges)
        e.observe(model.layout.pair_var(ed.src, ed.dst), static_cast<std::int32_t>(ed.etype + 1));
    const double tail = model.cardinality.log_tail_mass(k, 0);
    if (tail == kNegInf) return kNegInf;
    return evaluate(model.circuit, e, ws) + tail;
}

inline void fit_model_cardinality(SpgcModel& model, std::span<const SparseGraph> dataset, double alpha = 0.0) {
    model.cardinality = fit_cardinality(dataset, model.schema, alpha);
}

inline void fit_model_cardinality(DenseModel& model, std::span<const SparseGraph> dataset, double alpha = 0.0) {
    CardinalityTable joint = fit_cardinality(dataset, model.schema, alpha);
    model.cardinality.n_max = model.schema.n_max;
    model.cardinality.m_max = 0;
    model.cardinality.log_probs.assign(model.schema.n_max, kNegInf);
    for (std::uint32_t n = 1; n <= model.schema.n_max; ++n) {
        double acc = kNegInf;
        for (std::uint32_t m = 0; m <= model.schema.m_max; ++m) acc = log_add(acc, joint.at(n, m));
        model.cardinality.at(n, 0) = acc;
    }
}

} // namespace spgc
