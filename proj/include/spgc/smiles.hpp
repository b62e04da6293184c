#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spgc/canonical.hpp"
#include "spgc/error.hpp"
#include "spgc/graph.hpp"

namespace spgc {

/// Ordered atom symbols with maximum neutral valences. The master vocabulary
/// covers the supported SMILES subset; dataset vocabularies are subsets of
/// it in the same order.
struct AtomVocabulary {
    std::vector<std::string> symbols;
    std::vector<std::uint32_t> valences;

    static const AtomVocabulary& master() {
        static const AtomVocabulary v{{"B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I"},
                                      {3, 4, 3, 2, 1, 5, 6, 1, 1, 1}};
        return v;
    }

    static AtomVocabulary from_symbols(const std::vector<std::string>& syms) {
        const AtomVocabulary& m = master();
        AtomVocabulary v;
        for (const std::string& s : syms) {
            auto idx = m.find(s);
            if (!idx) raise(ErrorKind::config, "unknown atom symbol in vocabulary: " + s);
            v.symbols.push_back(s);
            v.valences.push_back(m.valences[*idx]);
        }
        return v;
    }

    std::optional<std::uint32_t> find(const std::string& s) const {
        for (std::size_t i = 0; i < symbols.size(); ++i)
            if (symbols[i] == s) return static_cast<std::uint32_t>(i);
        return std::nullopt;
    }

    std::size_t size() const { return symbols.size(); }
};

/// Fixed bond mapping: category 0/1/2 are single/double/triple (order
/// etype + 1). Symbols used on output; '-' is implicit on input and output.
struct BondVocabulary {
    static constexpr std::uint32_t kCategories = 3;
    static std::uint32_t order(std::uint32_t etype) { return etype + 1; }
    static char symbol(std::uint32_t etype) { return etype == 1 ? '=' : etype == 2 ? '#' : '-'; }
};

namespace detail {

[[noreturn]] inline void parse_fail(std::size_t col, const std::string& what) {
    raise(ErrorKind::parse, "parse error at position " + std::to_string(col) + ": " + what);
}

} // namespace detail

/// Recursive-subset SMILES parser: atoms {B,C,N,O,F,P,S,Cl,Br,I}, bonds
/// {-,=,#}, branches, ring closures (digits and %nn). Aromatic lowercase,
/// brackets, charges, stereo markers and '.' fragments are rejected with a
/// position-annotated error (1-based columns). Node types are indices into
/// `vocab`; hydrogens are implicit and never materialized.
inline SparseGraph parse_smiles(const std::string& s, const AtomVocabulary& vocab = AtomVocabulary::master()) {
    SparseGraph g;
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::int64_t prev = -1;
    std::int32_t pending = -1;
    std::size_t pending_col = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> branches; // (atom, column of '(')
    struct OpenRing {
        std::uint32_t atom;
        std::int32_t bond;
        std::size_t col;
    };
    std::map<std::uint32_t, OpenRing> rings;

    auto add_edge = [&](std::uint32_t a, std::uint32_t b, std::uint32_t etype, std::size_t col) {
        std::uint32_t hi = std::max(a, b), lo = std::min(a, b);
        if (!pairs.emplace(hi, lo).second) detail::parse_fail(col, "duplicate bond between the same atoms");
        g.edges.push_back({hi, lo, etype});
    };

    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        const std::size_t col = i + 1;
        if (c == 'C' || c == 'B' || c == 'N' || c == 'O' || c == 'F' || c == 'P' || c == 'S' || c == 'I') {
            std::string sym(1, c);
            if ((c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') || (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r')) {
                sym += s[i + 1];
                ++i;
            }
            auto t = vocab.find(sym);
            if (!t) detail::parse_fail(col, "atom '" + sym + "' not in the active vocabulary");
            const std::uint32_t idx = static_cast<std::uint32_t>(g.nodes.size());
            g.nodes.push_back(*t);
            if (prev >= 0)
                add_edge(static_cast<std::uint32_t>(prev), idx, pending < 0 ? 0 : static_cast<std::uint32_t>(pending),
                         col);
            else if (pending >= 0)
                detail::parse_fail(pending_col, "bond with no preceding atom");
            pending = -1;
            prev = idx;
            ++i;
            continue;
        }
        if (c == '-' || c == '=' || c == '#') {
            if (prev < 0) detail::parse_fail(col, "bond with no preceding atom");
            if (pending >= 0) detail::parse_fail(col, "two bond symbols in a row");
            pending = c == '-' ? 0 : c == '=' ? 1 : 2;
            pending_col = col;
            ++i;
            continue;
        }
        if (c == '(') {
            if (prev < 0) detail::parse_fail(col, "branch with no preceding atom");
            if (pending >= 0) detail::parse_fail(col, "bond symbol before '('");
            branches.emplace_back(static_cast<std::uint32_t>(prev), col);
            ++i;
            continue;
        }
        if (c == ')') {
            if (branches.empty()) detail::parse_fail(col, "unmatched ')'");
            if (pending >= 0) detail::parse_fail(pending_col, "dangling bond before ')'");
            prev = branches.back().first;
            branches.pop_back();
            ++i;
            continue;
        }
        if ((c >= '0' && c <= '9') || c == '%') {
            if (prev < 0) detail::parse_fail(col, "ring closure with no preceding atom");
            std::uint32_t num;
            if (c == '%') {
                if (i + 2 >= s.size() || s[i + 1] < '0' || s[i + 1] > '9' || s[i + 2] < '0' || s[i + 2] > '9')
                    detail::parse_fail(col, "'%' must be followed by two digits");
                num = static_cast<std::uint32_t>((s[i + 1] - '0') * 10 + (s[i + 2] - '0'));
                i += 3;
            } else {
                num = static_cast<std::uint32_t>(c - '0');
                ++i;
            }
            auto it = rings.find(num);
            if (it == rings.end()) {
                rings.emplace(num, OpenRing{static_cast<std::uint32_t>(prev), pending, col});
            } else {
                const OpenRing o = it->second;
                rings.erase(it);
                if (o.atom == static_cast<std::uint32_t>(prev))
                    detail::parse_fail(col, "ring closure would form a self-loop");
                if (o.bond >= 0 && pending >= 0 && o.bond != pending)
                    detail::parse_fail(col, "conflicting bond orders at ring closure");
                const std::int32_t order = o.bond >= 0 ? o.bond : pending >= 0 ? pending : 0;
                add_edge(o.atom, static_cast<std::uint32_t>(prev), static_cast<std::uint32_t>(order), col);
            }
            pending = -1;
            continue;
        }
        if (c >= 'a' && c <= 'z')
            detail::parse_fail(col, "aromatic atoms are not supported; provide kekulized input");
        detail::parse_fail(col, std::string("unsupported character '") + c + "'");
    }
    if (!branches.empty()) detail::parse_fail(branches.back().second, "unbalanced '('");
    if (!rings.empty()) detail::parse_fail(rings.begin()->second.col, "dangling ring closure");
    if (pending >= 0) detail::parse_fail(pending_col, "dangling bond at end of input");
    if (g.nodes.empty()) detail::parse_fail(1, "empty molecule");
    validate_graph(g);
    return g;
}

namespace detail {

inline std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adjacency(const SparseGraph& g) {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(g.node_count());
    for (const EdgeRecord& e : g.edges) {
        adj[e.src].emplace_back(e.dst, e.etype);
        adj[e.dst].emplace_back(e.src, e.etype);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

inline bool connected(const SparseGraph& g) {
    if (g.node_count() <= 1) return true;
    auto adj = adjacency(g);
    std::vector<bool> seen(g.node_count(), false);
    std::vector<std::uint32_t> stack{0};
    seen[0] = true;
    std::size_t visited = 1;
    while (!stack.empty()) {
        std::uint32_t u = stack.back();
        stack.pop_back();
        for (auto [v, t] : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                ++visited;
                stack.push_back(v);
            }
    }
    return visited == g.node_count();
}

} // namespace detail

/// Serializes a connected molecular graph as a parseable SMILES-subset
/// string. The graph is canonicalized first and the DFS follows canonical
/// node order, so isomorphic graphs produce identical strings and
/// parse_smiles(to_smiles(g)) is isomorphic to g.
inline std::string to_smiles(const SparseGraph& g, const AtomVocabulary& vocab = AtomVocabulary::master()) {
    validate_graph(g);
    for (NodeType t : g.nodes)
        if (t >= vocab.size()) raise(ErrorKind::data, "node type outside the atom vocabulary");
    if (!detail::connected(g)) raise(ErrorKind::data, "cannot serialize a disconnected graph");
    const SparseGraph canon = canonicalize(g).graph;
    const auto adj = detail::adjacency(canon);
    const std::size_t n = canon.node_count();

    // DFS classification: tree children per node and ring closures (back edges)
    std::vector<std::int32_t> parent(n, -1), order(n, -1);
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> tree_children(n);
    struct Closure {
        std::uint32_t open_atom, close_atom, etype;
        std::uint32_t digit = 0;
    };
    std::vector<Closure> closures;
    {
        std::int32_t clock = 0;
        std::function<void(std::uint32_t)> dfs = [&](std::uint32_t u) {
            order[u] = clock++;
            for (auto [v, t] : adj[u]) {
                if (order[v] < 0) {
                    parent[v] = static_cast<std::int32_t>(u);
                    tree_children[u].emplace_back(v, t);
                    dfs(v);
                } else if (order[v] < order[u] && static_cast<std::int32_t>(v) != parent[u]) {
                    closures.push_back({v, u, t}); // back edge to an ancestor
                }
            }
        };
        dfs(0);
    }
    std::stable_sort(closures.begin(), closures.end(),
                     [&](const Closure& a, const Closure& b) { return order[a.close_atom] < order[b.close_atom]; });
    std::vector<std::vector<std::size_t>> opens(n), closes(n);
    for (std::size_t i = 0; i < closures.size(); ++i) {
        opens[closures[i].open_atom].push_back(i);
        closes[closures[i].close_atom].push_back(i);
    }

    std::string out;
    std::set<std::uint32_t> free_digits;
    std::uint32_t next_digit = 1;
    auto take_digit = [&]() {
        if (!free_digits.empty()) {
            std::uint32_t d = *free_digits.begin();
            free_digits.erase(free_digits.begin());
            return d;
        }
        if (next_digit > 99) raise(ErrorKind::data, "more than 99 concurrently open ring closures");
        return next_digit++;
    };
    auto emit_digit = [&](std::uint32_t d) {
        if (d < 10) {
            out += static_cast<char>('0' + d);
        } else {
            out += '%';
            out += static_cast<char>('0' + d / 10);
            out += static_cast<char>('0' + d % 10);
        }
    };
    std::function<void(std::uint32_t)> write = [&](std::uint32_t u) {
        out += vocab.symbols[canon.nodes[u]];
        for (std::size_t ci : closes[u]) {
            if (closures[ci].etype != 0) out += BondVocabulary::symbol(closures[ci].etype);
            emit_digit(closures[ci].digit);
            free_digits.insert(closures[ci].digit);
        }
        for (std::size_t ci : opens[u]) {
            closures[ci].digit = take_digit();
            emit_digit(closures[ci].digit);
        }
        const auto& kids = tree_children[u];
        for (std::size_t k = 0; k < kids.size(); ++k) {
            const bool last = k + 1 == kids.size();
            if (!last) out += '(';
            if (kids[k].second != 0) out += BondVocabulary::symbol(kids[k].second);
            write(kids[k].first);
            if (!last) out += ')';
        }
    };
    write(0);
    return out;
}

/// Chemical validity under the valence table: every atom's total bond order
/// must not exceed its maximum valence and the graph must be connected.
struct ValidityResult {
    enum class Reason { none, valence_exceeded, disconnected, unknown_type };
    bool valid = false;
    Reason reason = Reason::none;
};

inline ValidityResult check_validity(const SparseGraph& g, const AtomVocabulary& vocab) {
    for (NodeType t : g.nodes)
        if (t >= vocab.size()) return {false, ValidityResult::Reason::unknown_type};
    std::vector<std::uint32_t> load(g.node_count(), 0);
    for (const EdgeRecord& e : g.edges) {
        load[e.src] += BondVocabulary::order(e.etype);
        load[e.dst] += BondVocabulary::order(e.etype);
    }
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (load[i] > vocab.valences[g.nodes[i]]) return {false, ValidityResult::Reason::valence_exceeded};
    if (!detail::connected(g)) return {false, ValidityResult::Reason::disconnected};
    return {true, ValidityResult::Reason::none};
}

} // namespace spgc
