#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "spgc/canonical.hpp"
#include "spgc/rng.hpp"

#include "oracles.hpp"

using namespace spgc;

namespace {

SparseGraph random_graph(Rng& rng, std::size_t n, std::uint32_t n_v, std::uint32_t n_e) {
    SparseGraph g;
    for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(static_cast<NodeType>(rng.bounded(n_v)));
    for (std::uint32_t i = 1; i < n; ++i)
        for (std::uint32_t j = 0; j < i; ++j)
            if (rng.uniform() < 0.4) g.edges.push_back({i, j, static_cast<std::uint32_t>(rng.bounded(n_e))});
    return g;
}

} // namespace

TEST_CASE("canonicalize basics") {
    SECTION("single node maps to itself") {
        SparseGraph g{{1}, {}};
        auto res = canonicalize(g);
        REQUIRE(res.graph == g);
        REQUIRE(res.perm == Permutation::identity(1));
    }
    SECTION("returned permutation maps the input onto the canonical form") {
        Rng rng(3);
        for (int it = 0; it < 30; ++it) {
            SparseGraph g = random_graph(rng, 2 + rng.bounded(5), 3, 2);
            auto res = canonicalize(g);
            REQUIRE(permute_sparse(g, res.perm) == res.graph);
            validate_graph(res.graph);
        }
    }
}

TEST_CASE("canonical form is stable under relabeling") {
    SECTION("C-C-O path under all labelings collapses to one orbit representative") {
        // types: 0 = C, 1 = O; path with the O at one end
        SparseGraph path{{0, 0, 1}, {{1, 0, 0}, {2, 1, 0}}};
        std::set<std::vector<std::uint64_t>> forms;
        for (const Permutation& p : oracles::all_permutations(3))
            forms.insert(detail::serialize_form(canonicalize(permute_sparse(path, p)).graph));
        REQUIRE(forms.size() == 1);
    }
    SECTION("vertex-transitive 4-cycle of identical nodes") {
        SparseGraph cycle{{0, 0, 0, 0}, {{1, 0, 0}, {2, 1, 0}, {3, 2, 0}, {3, 0, 0}}};
        std::set<std::vector<std::uint64_t>> forms;
        for (const Permutation& p : oracles::all_permutations(4))
            forms.insert(detail::serialize_form(canonicalize(permute_sparse(cycle, p)).graph));
        REQUIRE(forms.size() == 1);
    }
    SECTION("exhaustive stability for random graphs up to n = 5") {
        Rng rng(17);
        for (std::size_t n = 1; n <= 5; ++n) {
            for (int rep = 0; rep < 4; ++rep) {
                SparseGraph g = random_graph(rng, n, 2, 2);
                SparseGraph canon = canonicalize(g).graph;
                for (const Permutation& p : oracles::all_permutations(n)) {
                    REQUIRE(canonicalize(permute_sparse(g, p)).graph == canon);
                }
            }
        }
    }
    SECTION("edge types participate in the invariant") {
        // two triangles differing only in one edge type must canonicalize differently
        SparseGraph a{{0, 0, 0}, {{1, 0, 0}, {2, 0, 0}, {2, 1, 0}}};
        SparseGraph b{{0, 0, 0}, {{1, 0, 0}, {2, 0, 0}, {2, 1, 1}}};
        REQUIRE(!(canonicalize(a).graph == canonicalize(b).graph));
    }
}
