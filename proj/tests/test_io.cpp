#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "spgc/dataset_io.hpp"
#include "spgc/serialize.hpp"
#include "spgc/trainer.hpp"

#include "toy.hpp"

using namespace spgc;

TEST_CASE("dataset JSONL round trip") {
    Dataset ds;
    ds.schema = {3, 2, 2, 2};
    ds.graphs = {{{0}, {}}, {{0, 1}, {{1, 0, 1}}}, {{1, 1, 0}, {{1, 0, 0}, {2, 1, 1}}}};
    std::stringstream buf;
    write_dataset_jsonl(buf, ds);
    Dataset back = read_dataset_jsonl(buf);
    REQUIRE(back.schema == ds.schema);
    REQUIRE(back.graphs == ds.graphs);

    SECTION("writer output is stable") {
        std::stringstream again;
        write_dataset_jsonl(again, ds);
        REQUIRE(again.str() == buf.str());
    }
    SECTION("atoms header survives") {
        ds.atoms = {"C", "O"};
        std::stringstream b2;
        write_dataset_jsonl(b2, ds);
        Dataset d2 = read_dataset_jsonl(b2);
        REQUIRE(d2.atoms == ds.atoms);
    }
    SECTION("writer sorts sampler-ordered edges into the file order") {
        Dataset unsorted;
        unsorted.schema = {3, 2, 2, 2};
        unsorted.graphs = {{{0, 1, 1}, {{2, 1, 0}, {1, 0, 1}}}};
        std::stringstream b3;
        write_dataset_jsonl(b3, unsorted);
        Dataset d3 = read_dataset_jsonl(b3);
        REQUIRE(d3.graphs[0].edges == std::vector<EdgeRecord>{{1, 0, 1}, {2, 1, 0}});
    }
}

TEST_CASE("dataset JSONL validation") {
    SECTION("missing header") {
        std::stringstream in("{\"nodes\":[0]}\n");
        REQUIRE_THROWS_AS(read_dataset_jsonl(in), Error);
    }
    SECTION("schema violations are rejected with line numbers") {
        std::stringstream in("{\"schema\":{\"n_max\":2,\"m_max\":1,\"n_V\":2,\"n_E\":2}}\n{\"nodes\":[0,1,1]}\n");
        try {
            read_dataset_jsonl(in);
            FAIL("expected an error");
        } catch (const Error& e) {
            REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SECTION("unordered edges are rejected") {
        std::stringstream in(
            "{\"schema\":{\"n_max\":3,\"m_max\":2,\"n_V\":2,\"n_E\":2}}\n"
            "{\"nodes\":[0,0,0],\"edges\":[[2,1,0],[1,0,0]]}\n");
        REQUIRE_THROWS_AS(read_dataset_jsonl(in), Error);
    }
    SECTION("malformed JSON is a data error") {
        std::stringstream in("{\"schema\":{\"n_max\":2,\"m_max\":1,\"n_V\":2,\"n_E\":2}}\n{nodes\n");
        REQUIRE_THROWS_AS(read_dataset_jsonl(in), Error);
    }
}

TEST_CASE("smiles file reading") {
    std::stringstream in("CCO # ethanol\n\n  C1CC1\t\n# full comment line\nC#N\n");
    auto lines = read_smiles_lines(in);
    // the mid-token '#' in C#N is a triple bond, not a comment
    REQUIRE(lines == std::vector<std::string>{"CCO", "C1CC1", "C#N"});
}

TEST_CASE("smiles ingestion infers the schema") {
    std::vector<std::string> lines{"CCO", "C=O", "NC(=O)F", "C#C"};
    Dataset ds = ingest_smiles(lines);
    REQUIRE(ds.atoms == std::vector<std::string>{"C", "N", "O", "F"});
    REQUIRE(ds.schema.n_V == 4);
    REQUIRE(ds.schema.n_E == 3);
    REQUIRE(ds.schema.n_max == 4);
    REQUIRE(ds.schema.m_max == 3);
    REQUIRE(ds.graphs.size() == 4);
    for (const SparseGraph& g : ds.graphs) {
        REQUIRE_NOTHROW(validate_graph(g, ds.schema));
        REQUIRE(canonicalize(g).graph == g); // stored pre-canonicalized
    }
    SECTION("parse errors carry the molecule index") {
        try {
            ingest_smiles({"CCO", "C("});
            FAIL("expected an error");
        } catch (const Error& e) {
            REQUIRE(std::string(e.what()).find("molecule 2") != std::string::npos);
        }
    }
}

TEST_CASE("model serialization") {
    SpgcModel m = toy::toy_model(601);
    m.atoms = {"C", "N"};
    SECTION("round trip is bit-exact") {
        std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
        save_model(buf, m);
        const std::string first = buf.str();
        SpgcModel back = load_model(buf);
        REQUIRE(back.schema == m.schema);
        REQUIRE(back.atoms == m.atoms);
        REQUIRE(back.circuit.params == m.circuit.params);
        REQUIRE(back.circuit.children == m.circuit.children);
        REQUIRE(back.cardinality.log_probs == m.cardinality.log_probs);
        std::stringstream buf2(std::ios::in | std::ios::out | std::ios::binary);
        save_model(buf2, back);
        REQUIRE(buf2.str() == first);
    }
    SECTION("loaded models evaluate identically") {
        std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
        save_model(buf, m);
        SpgcModel back = load_model(buf);
        SparseGraph g{{0, 1, 1}, {{1, 0, 1}, {2, 0, 0}}};
        REQUIRE(log_prob(back, g) == log_prob(m, g));
        SubstructureEvidence sub;
        sub.nodes = {1};
        EvalWorkspace ws;
        REQUIRE(log_marginal(back, sub, ws) == log_marginal(m, sub, ws));
    }
    SECTION("corrupt input is rejected") {
        std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
        buf << "NOTAMODELFILE";
        REQUIRE_THROWS_AS(load_model(buf), Error);
        std::stringstream buf2(std::ios::in | std::ios::out | std::ios::binary);
        save_model(buf2, m);
        std::string bytes = buf2.str();
        bytes.resize(bytes.size() / 2); // truncate
        std::stringstream buf3(bytes, std::ios::in | std::ios::binary);
        REQUIRE_THROWS_AS(load_model(buf3), Error);
    }
}
