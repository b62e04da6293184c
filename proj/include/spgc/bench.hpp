#pragma once

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "spgc/model.hpp"
#include "spgc/rng.hpp"

namespace spgc {

/// Sparse and dense sides share these circuit knobs so a row pair isolates
/// the representation cost.
struct BenchCircuitConfig {
    std::uint32_t n_L_node = 2;
    std::uint32_t n_L_edge = 3;
    std::uint32_t n_S = 8;
    std::uint32_t n_I = 32;
    std::uint32_t n_c = 16;
};

struct BenchSchemaEntry {
    std::string name;
    DatasetSchema schema;
};

struct BenchConfig {
    std::vector<BenchSchemaEntry> schemas;
    std::uint32_t batch_size = 256;
    std::uint32_t repetitions = 5;
    std::uint64_t seed = 0;
    BenchCircuitConfig circuit;
    std::uint64_t mem_cap_bytes = 2ull << 30;

    void validate() const {
        if (repetitions < 3) raise(ErrorKind::config, "bench needs at least 3 repetitions");
        if (batch_size < 1) raise(ErrorKind::config, "bench batch size must be >= 1");
        if (schemas.empty()) raise(ErrorKind::config, "bench needs at least one schema");
    }
};

struct BenchRow {
    std::string kind; // "sparse" | "dense"
    std::string schema;
    std::uint32_t n_max = 0;
    std::uint32_t m_max = 0;
    std::uint32_t d = 0;
    double sec_per_batch = 0.0;
    std::uint64_t act_bytes = 0;
    std::uint64_t param_count = 0;
    bool skipped = false;
};

namespace detail {

/// Activation accounting: one double per unit per batch instance (what a
/// batched evaluator materializes) plus the parameters. Independent of the
/// host allocator, so rows are deterministic.
inline std::uint64_t activation_bytes(const Circuit& c, std::uint32_t batch) {
    return static_cast<std::uint64_t>(c.unit_count()) * batch * sizeof(double) +
           static_cast<std::uint64_t>(c.param_count()) * sizeof(double);
}

inline std::vector<Evidence> random_batch(const Circuit& c, std::uint32_t batch, Rng& rng) {
    std::vector<Evidence> out;
    out.reserve(batch);
    for (std::uint32_t i = 0; i < batch; ++i) {
        Evidence e(c.vars.size());
        for (std::size_t v = 0; v < c.vars.size(); ++v)
            e.observe(v, static_cast<std::int32_t>(rng.bounded(c.vars[v].domain)));
        out.push_back(std::move(e));
    }
    return out;
}

inline double time_batches(const Circuit& c, const std::vector<Evidence>& batch, std::uint32_t reps) {
    EvalWorkspace ws;
    std::vector<double> times;
    volatile double sink = 0.0;
    for (std::uint32_t r = 0; r <= reps; ++r) { // first pass is warmup
        const auto start = std::chrono::steady_clock::now();
        for (const Evidence& e : batch) sink = sink + evaluate(c, e, ws);
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (r > 0) times.push_back(sec);
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

} // namespace detail

/// For each schema, builds matched sparse and dense models, evaluates
/// batches of random fully observed evidence single-threaded, and reports
/// the median seconds per batch plus the deterministic structural columns.
/// A side whose estimated activation footprint exceeds the memory cap is
/// marked skipped and the run continues.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<BenchRow> rows;
    for (const BenchSchemaEntry& entry : cfg.schemas) {
        entry.schema.validate();
        ModelConfig mc;
        mc.kind = RegionGraphSpec::Kind::BT;
        mc.n_c = cfg.circuit.n_c;
        mc.n_R = 1;
        mc.seed = cfg.seed;
        mc.node_type = {cfg.circuit.n_L_node, cfg.circuit.n_S, cfg.circuit.n_I};
        mc.edge_index = {cfg.circuit.n_L_edge, cfg.circuit.n_S, cfg.circuit.n_I};
        mc.edge_type = {cfg.circuit.n_L_edge, cfg.circuit.n_S, cfg.circuit.n_I};
        for (const bool dense : {false, true}) {
            BenchRow row;
            row.kind = dense ? "dense" : "sparse";
            row.schema = entry.name;
            row.n_max = entry.schema.n_max;
            row.m_max = entry.schema.m_max;
            row.d = dense ? DenseBaselineLayout{entry.schema}.var_count() : VariableLayout{entry.schema}.var_count();
            // input units alone bound the activation footprint from below
            const std::uint64_t est =
                static_cast<std::uint64_t>(cfg.circuit.n_I) * row.d * cfg.batch_size * sizeof(double);
            if (est > cfg.mem_cap_bytes) {
                row.skipped = true;
                rows.push_back(std::move(row));
                continue;
            }
            Circuit circuit;
            if (dense) {
                DenseModel m = build_dense_baseline(entry.schema, mc);
                circuit = std::move(m.circuit);
            } else {
                SpgcModel m = build_spgc_model(entry.schema, mc);
                circuit = std::move(m.circuit);
            }
            randomize_params(circuit, derive_seed(cfg.seed, dense ? 2 : 1));
            row.act_bytes = detail::activation_bytes(circuit, cfg.batch_size);
            row.param_count = circuit.param_count();
            if (row.act_bytes > cfg.mem_cap_bytes) {
                row.skipped = true;
                rows.push_back(std::move(row));
                continue;
            }
            Rng rng(derive_seed(cfg.seed, dense ? 4 : 3));
            const std::vector<Evidence> batch = detail::random_batch(circuit, cfg.batch_size, rng);
            row.sec_per_batch = detail::time_batches(circuit, batch, cfg.repetitions);
            rows.push_back(std::move(row));
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return a.kind != b.kind ? a.kind < b.kind : a.n_max < b.n_max;
    });
    return rows;
}

inline void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
    out << "kind,schema,n_max,m_max,D,sec_per_batch,act_bytes,param_count\n";
    char buf[64];
    for (const BenchRow& r : rows) {
        if (r.skipped) {
            std::snprintf(buf, sizeof(buf), "skipped");
        } else {
            std::snprintf(buf, sizeof(buf), "%.6f", r.sec_per_batch);
        }
        out << r.kind << ',' << r.schema << ',' << r.n_max << ',' << r.m_max << ',' << r.d << ',' << buf << ','
            << r.act_bytes << ',' << r.param_count << '\n';
    }
}

/// Reference molecular dataset schemas used by the default benchmark run.
inline std::vector<BenchSchemaEntry> reference_bench_schemas() {
    return {{"qm9", {9, 12, 4, 3}},
            {"zinc250k", {38, 45, 9, 3}},
            {"guacamol", {88, 87, 12, 3}},
            {"polymer", {122, 145, 7, 3}}};
}

} // namespace spgc
