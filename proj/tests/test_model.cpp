#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "spgc/model.hpp"
#include "spgc/rng.hpp"

#include "oracles.hpp"
#include "toy.hpp"

using namespace spgc;
using toy::tiny_config;
using toy::toy_model;

TEST_CASE("variable layouts match the closed-form sizes") {
    struct Row {
        const char* name;
        DatasetSchema s;
        std::uint32_t sparse_d, dense_d;
    };
    const Row rows[] = {
        {"QM9", {9, 12, 4, 3}, 45, 45},
        {"Zinc250k", {38, 45, 9, 3}, 173, 741},
        {"Guacamol", {88, 87, 12, 3}, 349, 3916},
        {"Polymer", {122, 145, 7, 3}, 557, 7503},
    };
    for (const Row& r : rows) {
        VariableLayout sl{r.s};
        DenseBaselineLayout dl{r.s};
        CAPTURE(r.name);
        REQUIRE(sl.var_count() == r.sparse_d);
        REQUIRE(dl.var_count() == r.dense_d);
    }
}

TEST_CASE("graph_to_evidence marginalization padding") {
    DatasetSchema schema{4, 3, 3, 2};
    VariableLayout layout{schema};
    SECTION("boundary graph leaves no slot marginalized") {
        SparseGraph g{{0, 1, 2, 0}, {{1, 0, 0}, {2, 1, 1}, {3, 2, 0}}};
        Evidence e = graph_to_evidence(layout, g);
        for (std::uint32_t v = 0; v < layout.var_count(); ++v) REQUIRE(e.observed(v));
    }
    SECTION("edgeless graph marginalizes all edge slots") {
        SparseGraph g{{1, 2}, {}};
        Evidence e = graph_to_evidence(layout, g);
        REQUIRE(e.value(layout.node_var(0)) == 1);
        REQUIRE(e.value(layout.node_var(1)) == 2);
        for (std::uint32_t v = 2; v < 4; ++v) REQUIRE(!e.observed(layout.node_var(v)));
        for (std::uint32_t j = 0; j < 3; ++j) {
            REQUIRE(!e.observed(layout.src_var(j)));
            REQUIRE(!e.observed(layout.dst_var(j)));
            REQUIRE(!e.observed(layout.etype_var(j)));
        }
    }
    SECTION("edge slots carry the canonical triples in order") {
        SparseGraph g{{0, 1, 2}, {{1, 0, 1}, {2, 0, 0}}};
        Evidence e = graph_to_evidence(layout, g);
        REQUIRE(e.value(layout.src_var(0)) == 1);
        REQUIRE(e.value(layout.dst_var(0)) == 0);
        REQUIRE(e.value(layout.etype_var(0)) == 1);
        REQUIRE(e.value(layout.src_var(1)) == 2);
        REQUIRE(e.value(layout.etype_var(1)) == 0);
    }
    SECTION("out-of-schema graphs are rejected") {
        REQUIRE_THROWS_AS(graph_to_evidence(layout, SparseGraph{{0, 0, 0, 0, 0}, {}}), Error);
    }
}

TEST_CASE("fit_cardinality") {
    DatasetSchema schema{3, 2, 2, 2};
    SECTION("empirical frequencies") {
        std::vector<SparseGraph> data{{{0, 0}, {{1, 0, 0}}}, {{0, 0}, {{1, 0, 0}}}, {{0, 0, 0}, {{1, 0, 0}, {2, 0, 0}}}};
        CardinalityTable t = fit_cardinality(data, schema);
        REQUIRE(std::exp(t.at(2, 1)) == Catch::Approx(2.0 / 3.0).margin(1e-12));
        REQUIRE(std::exp(t.at(3, 2)) == Catch::Approx(1.0 / 3.0).margin(1e-12));
        REQUIRE(t.at(1, 0) == kNegInf);
        t.validate();
    }
    SECTION("single graph gives a point mass") {
        std::vector<SparseGraph> data{{{0}, {}}};
        CardinalityTable t = fit_cardinality(data, schema);
        REQUIRE(t.at(1, 0) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("table sums to one on random datasets") {
        Rng rng(71);
        for (int it = 0; it < 100; ++it) {
            std::vector<SparseGraph> data;
            const std::size_t count = 1 + rng.bounded(20);
            for (std::size_t i = 0; i < count; ++i) {
                const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.bounded(3));
                SparseGraph g;
                for (std::uint32_t k = 0; k < n; ++k) g.nodes.push_back(0);
                if (n >= 2 && rng.uniform() < 0.5) g.edges.push_back({1, 0, 0});
                data.push_back(g);
            }
            CardinalityTable t = fit_cardinality(data, schema, rng.uniform() < 0.5 ? 0.0 : 0.3);
            REQUIRE(std::exp(log_sum_exp(t.log_probs)) == Catch::Approx(1.0).margin(1e-12));
        }
    }
    SECTION("empty dataset raises") {
        REQUIRE_THROWS_AS(fit_cardinality({}, schema), Error);
    }
}

TEST_CASE("log_prob") {
    SpgcModel m = toy_model(101);
    SECTION("permutation invariance is exact") {
        Rng rng(5);
        for (int it = 0; it < 20; ++it) {
            const std::size_t n = 1 + rng.bounded(3);
            SparseGraph g;
            for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(static_cast<NodeType>(rng.bounded(2)));
            std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
            for (std::uint32_t i = 1; i < n; ++i)
                for (std::uint32_t j = 0; j < i; ++j) pairs.emplace_back(i, j);
            for (auto [a, b] : pairs)
                if (g.edges.size() < 2 && rng.uniform() < 0.5)
                    g.edges.push_back({a, b, static_cast<std::uint32_t>(rng.bounded(2))});
            const double base = log_prob(m, g);
            for (const Permutation& p : oracles::all_permutations(n))
                REQUIRE(log_prob(m, permute_sparse(g, p)) == base);
        }
    }
    SECTION("joint normalization over the padded slot space") {
        // For each (n, m), summing exp(evaluate) over every assignment of the
        // observed slots gives one; weighting by p(n, m) totals one. Valid
        // canonical graphs carry a strict subset of that mass (endpoint slots
        // also range over padded indices), which the model documents.
        EvalWorkspace ws;
        double total = 0.0;
        for (std::uint32_t n = 1; n <= m.schema.n_max; ++n) {
            for (std::uint32_t mm = 0; mm <= m.schema.m_max; ++mm) {
                const double lc = m.cardinality.at(n, mm);
                if (lc == kNegInf) continue;
                std::vector<std::uint32_t> observed;
                for (std::uint32_t i = 0; i < n; ++i) observed.push_back(m.layout.node_var(i));
                for (std::uint32_t j = 0; j < mm; ++j) {
                    observed.push_back(m.layout.src_var(j));
                    observed.push_back(m.layout.dst_var(j));
                    observed.push_back(m.layout.etype_var(j));
                }
                double mass = 0.0;
                oracles::for_each_assignment(m.circuit, Evidence::all_marginalized(m.layout.var_count()), observed,
                                             [&](const Evidence& e) { mass += std::exp(evaluate(m.circuit, e, ws)); });
                REQUIRE(mass == Catch::Approx(1.0).margin(1e-9));
                total += std::exp(lc) * mass;
            }
        }
        REQUIRE(total == Catch::Approx(1.0).margin(1e-9));

        double valid_mass = 0.0;
        std::set<std::vector<std::uint64_t>> seen;
        for (const SparseGraph& g : oracles::enumerate_valid_graphs(m.schema)) {
            auto canon = canonicalize(g).graph;
            if (!seen.insert(detail::serialize_form(canon)).second) continue;
            valid_mass += std::exp(log_prob(m, canon));
        }
        REQUIRE(valid_mass <= 1.0 + 1e-9);
    }
    SECTION("point-mass cardinality sends off-support graphs to -inf") {
        SpgcModel pm = toy_model(33);
        for (double& v : pm.cardinality.log_probs) v = kNegInf;
        pm.cardinality.at(2, 1) = 0.0;
        REQUIRE(log_prob(pm, SparseGraph{{0, 1}, {{1, 0, 0}}}) > kNegInf);
        REQUIRE(log_prob(pm, SparseGraph{{0, 1}, {}}) == kNegInf);
        REQUIRE(log_prob(pm, SparseGraph{{0}, {}}) == kNegInf);
    }
}

TEST_CASE("marginal") {
    SpgcModel m = toy_model(202);
    EvalWorkspace ws;
    SECTION("empty evidence has log-marginal exactly zero") {
        REQUIRE(log_marginal(m, SubstructureEvidence{}) == 0.0);
    }
    SECTION("matches brute-force enumeration over slot completions") {
        Rng rng(7);
        for (int it = 0; it < 50; ++it) {
            // random substructure evidence within bounds
            SubstructureEvidence sub;
            const std::uint32_t k = static_cast<std::uint32_t>(rng.bounded(4));
            for (std::uint32_t i = 0; i < k; ++i) sub.nodes.push_back(static_cast<NodeType>(rng.bounded(2)));
            if (k >= 2 && rng.uniform() < 0.6) sub.edges.push_back({1, 0, static_cast<std::uint32_t>(rng.bounded(2))});
            if (k >= 3 && rng.uniform() < 0.4) sub.edges.push_back({2, 0, static_cast<std::uint32_t>(rng.bounded(2))});

            // oracle: for each (n, m) >= (k, l), enumerate every completion of
            // the remaining observed slots and accumulate with p(n, m)
            double total = 0.0;
            for (std::uint32_t n = sub.k(); n <= m.schema.n_max; ++n) {
                if (n < 1) continue;
                for (std::uint32_t mm = sub.l(); mm <= m.schema.m_max; ++mm) {
                    const double lc = m.cardinality.at(n, mm);
                    if (lc == kNegInf) continue;
                    Evidence base = substructure_to_evidence(m.layout, sub);
                    std::vector<std::uint32_t> free_slots;
                    for (std::uint32_t i = sub.k(); i < n; ++i) free_slots.push_back(m.layout.node_var(i));
                    for (std::uint32_t j = sub.l(); j < mm; ++j) {
                        free_slots.push_back(m.layout.src_var(j));
                        free_slots.push_back(m.layout.dst_var(j));
                        free_slots.push_back(m.layout.etype_var(j));
                    }
                    oracles::for_each_assignment(m.circuit, base, free_slots, [&](const Evidence& e) {
                        total += std::exp(oracles::reference_log_value(m.circuit, e) + lc);
                    });
                }
            }
            const double got = log_marginal(m, sub, ws);
            REQUIRE(std::exp(got) == Catch::Approx(total).margin(1e-9));
        }
    }
    SECTION("full graph with point-mass cardinality equals log_prob") {
        SpgcModel pm = toy_model(44);
        for (double& v : pm.cardinality.log_probs) v = kNegInf;
        pm.cardinality.at(3, 2) = 0.0;
        SparseGraph g{{0, 1, 1}, {{1, 0, 0}, {2, 0, 1}}};
        const SparseGraph canon = canonicalize(g).graph;
        REQUIRE(log_marginal(pm, SubstructureEvidence::from_graph(canon), ws) ==
                Catch::Approx(log_prob(pm, g)).margin(1e-12));
    }
    SECTION("adding an observed edge never increases the marginal") {
        SubstructureEvidence sub;
        sub.nodes = {0, 1, 1};
        const double before = log_marginal(m, sub, ws);
        sub.edges.push_back({1, 0, 0});
        const double mid = log_marginal(m, sub, ws);
        sub.edges.push_back({2, 0, 1});
        const double after = log_marginal(m, sub, ws);
        REQUIRE(mid <= before);
        REQUIRE(after <= mid);
    }
    SECTION("out-of-bounds evidence raises") {
        SubstructureEvidence sub;
        sub.nodes.assign(4, 0);
        REQUIRE_THROWS_AS(log_marginal(m, sub, ws), Error);
    }
}

TEST_CASE("dense baseline") {
    DatasetSchema schema{3, 3, 2, 2};
    ModelConfig cfg = tiny_config(7);
    DenseModel dm = build_dense_baseline(schema, cfg);
    randomize_params(dm.circuit, 71, 0.6);
    SECTION("layout and structure") {
        REQUIRE(dm.layout.var_count() == 6);
        REQUIRE(oracles::check_structure(dm.circuit) == "");
    }
    SECTION("p(N) fit and joint normalization at toy scale") {
        std::vector<SparseGraph> data{{{0}, {}}, {{0, 1}, {{1, 0, 0}}}, {{0, 1, 0}, {{1, 0, 1}, {2, 1, 0}}},
                                      {{1, 1}, {{1, 0, 1}}}};
        fit_model_cardinality(dm, data);
        REQUIRE(std::exp(log_sum_exp(dm.cardinality.log_probs)) == Catch::Approx(1.0).margin(1e-12));
        // brute force: sum over n and all observed dense assignments
        EvalWorkspace ws;
        double total = 0.0;
        for (std::uint32_t n = 1; n <= schema.n_max; ++n) {
            const double lc = dm.cardinality.at(n, 0);
            if (lc == kNegInf) continue;
            std::vector<std::uint32_t> observed;
            for (std::uint32_t i = 0; i < n; ++i) observed.push_back(dm.layout.node_var(i));
            for (std::uint32_t i = 1; i < n; ++i)
                for (std::uint32_t j = 0; j < i; ++j) observed.push_back(dm.layout.pair_var(i, j));
            double mass = 0.0;
            oracles::for_each_assignment(dm.circuit, Evidence::all_marginalized(dm.layout.var_count()), observed,
                                         [&](const Evidence& e) { mass += std::exp(evaluate(dm.circuit, e, ws)); });
            REQUIRE(mass == Catch::Approx(1.0).margin(1e-9));
            total += std::exp(lc) * mass;
        }
        REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("log_prob is permutation-invariant and matches evidence evaluation") {
        std::vector<SparseGraph> data{{{0, 1}, {{1, 0, 0}}}, {{0, 1, 0}, {{1, 0, 1}}}};
        fit_model_cardinality(dm, data);
        SparseGraph g{{0, 1, 0}, {{1, 0, 1}}};
        const double base = log_prob(dm, g);
        for (const Permutation& p : oracles::all_permutations(3)) REQUIRE(log_prob(dm, permute_sparse(g, p)) == base);
        // absent pairs are distinct evidence from marginalized pairs
        SparseGraph g2{{0, 1}, {{1, 0, 0}}};
        EvalWorkspace ws;
        const SparseGraph canon = canonicalize(g2).graph;
        REQUIRE(log_prob(dm, g2) == Catch::Approx(evaluate(dm.circuit, graph_to_evidence(dm.layout, canon), ws) +
                                                  dm.cardinality.at(2, 0))
                                        .margin(1e-12));
    }
}
