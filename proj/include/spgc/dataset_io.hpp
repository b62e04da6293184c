#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spgc/canonical.hpp"
#include "spgc/graph.hpp"
#include "spgc/smiles.hpp"

namespace spgc {

/// Graphs plus their schema; `atoms` is present for molecule datasets and
/// maps node categories onto symbols.
struct Dataset {
    DatasetSchema schema;
    std::vector<std::string> atoms;
    std::vector<SparseGraph> graphs;
};

inline nlohmann::json graph_to_json(const SparseGraph& g) {
    nlohmann::json j;
    j["nodes"] = g.nodes;
    auto edges = nlohmann::json::array();
    for (const EdgeRecord& e : g.edges) edges.push_back({e.src, e.dst, e.etype});
    j["edges"] = std::move(edges);
    return j;
}

inline SparseGraph graph_from_json(const nlohmann::json& j) {
    SparseGraph g;
    if (!j.contains("nodes") || !j["nodes"].is_array()) raise(ErrorKind::data, "graph record must have a nodes array");
    for (const auto& n : j["nodes"]) g.nodes.push_back(n.get<NodeType>());
    if (j.contains("edges"))
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 3) raise(ErrorKind::data, "edge must be a [src,dst,etype] triple");
            g.edges.push_back({e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>(), e[2].get<std::uint32_t>()});
        }
    return g;
}

/// JSON Lines dataset: a header object {"schema": {...}} (plus "atoms" for
/// molecule datasets) followed by one graph object per line. Edges are
/// required to be normalized (src > dst) and listed in row-major
/// lower-triangle order.
inline void write_dataset_jsonl(std::ostream& out, const Dataset& ds) {
    nlohmann::json header;
    header["schema"] = {{"n_max", ds.schema.n_max}, {"m_max", ds.schema.m_max}, {"n_V", ds.schema.n_V},
                        {"n_E", ds.schema.n_E}};
    if (!ds.atoms.empty()) header["atoms"] = ds.atoms;
    out << header.dump() << '\n';
    for (const SparseGraph& g : ds.graphs) {
        SparseGraph sorted = g;
        std::sort(sorted.edges.begin(), sorted.edges.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
            return a.src != b.src ? a.src < b.src : a.dst < b.dst;
        });
        out << graph_to_json(sorted).dump() << '\n';
    }
}

inline Dataset read_dataset_jsonl(std::istream& in) {
    Dataset ds;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorKind::data, "line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        if (!have_header) {
            if (!j.contains("schema")) raise(ErrorKind::data, "first line must carry the dataset schema");
            const auto& s = j["schema"];
            ds.schema = {s.at("n_max").get<std::uint32_t>(), s.at("m_max").get<std::uint32_t>(),
                         s.at("n_V").get<std::uint32_t>(), s.at("n_E").get<std::uint32_t>()};
            ds.schema.validate();
            if (j.contains("atoms")) {
                for (const auto& a : j["atoms"]) ds.atoms.push_back(a.get<std::string>());
                if (ds.atoms.size() != ds.schema.n_V)
                    raise(ErrorKind::data, "atoms list does not match the schema's node category count");
            }
            have_header = true;
            continue;
        }
        SparseGraph g = graph_from_json(j);
        try {
            validate_graph(g, ds.schema);
        } catch (const Error& e) {
            raise(ErrorKind::data, "line " + std::to_string(lineno) + ": " + e.what());
        }
        for (std::size_t i = 1; i < g.edges.size(); ++i) {
            const bool ordered = g.edges[i - 1].src < g.edges[i].src ||
                                 (g.edges[i - 1].src == g.edges[i].src && g.edges[i - 1].dst < g.edges[i].dst);
            if (!ordered)
                raise(ErrorKind::data,
                      "line " + std::to_string(lineno) + ": edges must be in row-major lower-triangle order");
        }
        ds.graphs.push_back(std::move(g));
    }
    if (!have_header) raise(ErrorKind::data, "dataset is missing its schema header line");
    return ds;
}

/// SMILES-subset text file: one molecule per line, blank lines skipped. A
/// '#' opens a comment only at the start of a line or after whitespace;
/// mid-token '#' is the triple-bond symbol.
inline std::vector<std::string> read_smiles_lines(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        for (std::size_t pos = 0; pos < line.size(); ++pos) {
            if (line[pos] == '#' && (pos == 0 || line[pos - 1] == ' ' || line[pos - 1] == '\t')) {
                line.erase(pos);
                break;
            }
        }
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        if (start) line.erase(0, start);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

/// Parses molecules, infers the dataset schema (observed atom vocabulary in
/// master order, observed bond categories, maximal sizes) and canonicalizes
/// every graph.
inline Dataset ingest_smiles(const std::vector<std::string>& lines) {
    if (lines.empty()) raise(ErrorKind::data, "no molecules to ingest");
    const AtomVocabulary& master = AtomVocabulary::master();
    std::vector<SparseGraph> parsed;
    std::vector<bool> used_type(master.size(), false);
    std::uint32_t n_max = 1, m_max = 0, max_etype = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        SparseGraph g;
        try {
            g = parse_smiles(lines[i], master);
        } catch (const Error& e) {
            raise(ErrorKind::parse, "molecule " + std::to_string(i + 1) + ": " + e.what());
        }
        for (NodeType t : g.nodes) used_type[t] = true;
        for (const EdgeRecord& e : g.edges) max_etype = std::max(max_etype, e.etype);
        n_max = std::max(n_max, static_cast<std::uint32_t>(g.node_count()));
        m_max = std::max(m_max, static_cast<std::uint32_t>(g.edge_count()));
        parsed.push_back(std::move(g));
    }
    Dataset ds;
    std::vector<std::uint32_t> remap(master.size(), 0);
    for (std::uint32_t t = 0; t < master.size(); ++t) {
        if (!used_type[t]) continue;
        remap[t] = static_cast<std::uint32_t>(ds.atoms.size());
        ds.atoms.push_back(master.symbols[t]);
    }
    ds.schema = {n_max, m_max, static_cast<std::uint32_t>(ds.atoms.size()), max_etype + 1};
    for (SparseGraph& g : parsed) {
        for (NodeType& t : g.nodes) t = remap[t];
        ds.graphs.push_back(canonicalize(g).graph);
    }
    return ds;
}

} // namespace spgc
