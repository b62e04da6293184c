#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "spgc/circuit_sample.hpp"
#include "spgc/model.hpp"
#include "spgc/rng.hpp"

namespace spgc {

/// Collision handling for edge-index draws. A colliding pair (self-loop or
/// repeat of an earlier unordered pair) is redrawn from the selected input
/// units restricted to [0, n) up to max_retries times; if every retry
/// collides, the pair falls back to a uniform draw over the remaining valid
/// unordered pairs. Retry and fallback events are counted for telemetry.
struct CollisionPolicy {
    std::uint32_t max_retries = 100;

    void validate() const {
        if (max_retries < 1) raise(ErrorKind::config, "max_retries must be >= 1");
    }
};

struct SampleStats {
    std::uint64_t collisions = 0;
    std::uint64_t retries = 0;
    std::uint64_t fallbacks = 0;
};

/// Substructure-conditioned generation. Draws (n, m) from the posterior
/// p(n, m | ev) over n >= k, m >= l - the circuit factor is constant across
/// the tail under marginalization padding, so the posterior is the
/// tail-renormalized cardinality - then samples the free slots top-down with
/// the evidence fixed. Edge-index draws are restricted to [0, n) and
/// renormalized; evidence edges count toward the used-pair set. The output
/// keeps the evidence in slots [0, k) and [0, l) and is always simple.
inline SparseGraph sample_conditional(const SpgcModel& model, const SubstructureEvidence& sub,
                                      const CollisionPolicy& policy, Rng& rng, EvalWorkspace& ws,
                                      SampleStats* stats = nullptr) {
    policy.validate();
    sub.validate(model.schema);
    const Evidence ev = substructure_to_evidence(model.layout, sub);
    if (evaluate(model.circuit, ev, ws) == kNegInf)
        raise(ErrorKind::numeric, "conditional sampling from zero-mass evidence");

    // posterior over the cardinality tail
    std::vector<double> cell_logp;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
    for (std::uint32_t n = std::max(sub.k(), 1u); n <= model.schema.n_max; ++n)
        for (std::uint32_t m = sub.l(); m <= model.schema.m_max; ++m) {
            if (model.cardinality.at(n, m) == kNegInf) continue;
            cells.emplace_back(n, m);
            cell_logp.push_back(model.cardinality.at(n, m));
        }
    if (cells.empty()) raise(ErrorKind::numeric, "no cardinality mass compatible with the evidence");
    const auto [n, m] = cells[rng.categorical_from_log(cell_logp)];
    if (m > n * (n - 1) / 2)
        raise(ErrorKind::numeric, "cardinality table places mass on more edges than a simple graph admits");

    DrawLimits limits(model.layout.var_count(), -1);
    for (std::uint32_t j = sub.l(); j < m; ++j) {
        limits[model.layout.src_var(j)] = static_cast<std::int32_t>(n);
        limits[model.layout.dst_var(j)] = static_cast<std::int32_t>(n);
    }
    const SampleTrace tr = sample_topdown(model.circuit, ev, rng, ws, &limits);

    SparseGraph g;
    g.nodes.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
        g.nodes.push_back(static_cast<NodeType>(tr.assignment[model.layout.node_var(i)]));

    std::set<std::pair<std::uint32_t, std::uint32_t>> used;
    for (std::uint32_t j = 0; j < sub.l(); ++j) {
        g.edges.push_back(sub.edges[j]);
        used.emplace(sub.edges[j].src, sub.edges[j].dst);
    }
    std::vector<std::uint32_t> allowed(n);
    for (std::uint32_t i = 0; i < n; ++i) allowed[i] = i;
    for (std::uint32_t j = sub.l(); j < m; ++j) {
        std::uint32_t s = static_cast<std::uint32_t>(tr.assignment[model.layout.src_var(j)]);
        std::uint32_t d = static_cast<std::uint32_t>(tr.assignment[model.layout.dst_var(j)]);
        auto norm = [](std::uint32_t a, std::uint32_t b) {
            return a > b ? std::make_pair(a, b) : std::make_pair(b, a);
        };
        auto ok = [&](std::uint32_t a, std::uint32_t b) { return a != b && !used.count(norm(a, b)); };
        if (!ok(s, d)) {
            if (stats) ++stats->collisions;
            const std::vector<double> src_lp = restricted_input_distribution(model.circuit, tr, model.layout.src_var(j), allowed);
            const std::vector<double> dst_lp = restricted_input_distribution(model.circuit, tr, model.layout.dst_var(j), allowed);
            bool resolved = false;
            for (std::uint32_t t = 0; t < policy.max_retries && !resolved; ++t) {
                if (stats) ++stats->retries;
                s = allowed[rng.categorical_from_log(src_lp)];
                d = allowed[rng.categorical_from_log(dst_lp)];
                resolved = ok(s, d);
            }
            if (!resolved) {
                std::vector<std::pair<std::uint32_t, std::uint32_t>> valid;
                for (std::uint32_t a = 1; a < n; ++a)
                    for (std::uint32_t b = 0; b < a; ++b)
                        if (!used.count({a, b})) valid.emplace_back(a, b);
                if (valid.empty()) raise(ErrorKind::numeric, "no valid node pair remains for an edge");
                if (stats) ++stats->fallbacks;
                auto [a, b] = valid[rng.bounded(valid.size())];
                s = a;
                d = b;
            }
        }
        const auto [hi, lo] = norm(s, d);
        used.emplace(hi, lo);
        g.edges.push_back({hi, lo, static_cast<std::uint32_t>(tr.assignment[model.layout.etype_var(j)])});
    }
    return g;
}

/// Unconditional generation: conditional sampling with empty evidence.
inline SparseGraph sample(const SpgcModel& model, const CollisionPolicy& policy, Rng& rng, EvalWorkspace& ws,
                          SampleStats* stats = nullptr) {
    return sample_conditional(model, SubstructureEvidence{}, policy, rng, ws, stats);
}

inline SparseGraph sample(const SpgcModel& model, const CollisionPolicy& policy, Rng& rng,
                          SampleStats* stats = nullptr) {
    EvalWorkspace ws;
    return sample_conditional(model, SubstructureEvidence{}, policy, rng, ws, stats);
}

} // namespace spgc
