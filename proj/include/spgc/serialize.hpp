#pragma once

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "spgc/model.hpp"

namespace spgc {

/// Binary model file, version 1. Little-endian throughout; doubles are raw
/// IEEE-754 bit patterns, so save/load round trips are bit-exact. Layout:
///
///   magic "SPGCMDL1"
///   u32 version
///   u32 n_max, m_max, n_V, n_E
///   u32 atom_count, then per atom: u32 length + bytes
///   u8 kind (0 BT, 1 RT), u32 n_c, u32 n_R, u64 seed
///   3 groups (node_type, edge_index, edge_type): u32 n_L, n_S, n_I
///   u64 unit_count, then per unit:
///     u8 kind (0 input, 1 sum, 2 product)
///     input: u32 variable index; sum/product: u32 child count + children
///   u64 param_count + raw doubles
///   u32 cardinality rows, cols + raw doubles
///
/// Parameter offsets and scope intervals are derived from the unit list on
/// load, matching the builder's allocation order.
namespace detail {

inline constexpr char kModelMagic[8] = {'S', 'P', 'G', 'C', 'M', 'D', 'L', '1'};

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) raise(ErrorKind::data, "model file truncated");
    return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
    const std::uint32_t len = get<std::uint32_t>(in);
    if (len > 64) raise(ErrorKind::data, "model file has an implausible string length");
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) raise(ErrorKind::data, "model file truncated");
    return s;
}

} // namespace detail

inline void save_model(std::ostream& out, const SpgcModel& m) {
    out.write(detail::kModelMagic, sizeof(detail::kModelMagic));
    detail::put<std::uint32_t>(out, 1);
    detail::put<std::uint32_t>(out, m.schema.n_max);
    detail::put<std::uint32_t>(out, m.schema.m_max);
    detail::put<std::uint32_t>(out, m.schema.n_V);
    detail::put<std::uint32_t>(out, m.schema.n_E);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.atoms.size()));
    for (const std::string& a : m.atoms) detail::put_string(out, a);
    detail::put<std::uint8_t>(out, m.config.kind == RegionGraphSpec::Kind::BT ? 0 : 1);
    detail::put<std::uint32_t>(out, m.config.n_c);
    detail::put<std::uint32_t>(out, m.config.n_R);
    detail::put<std::uint64_t>(out, m.config.seed);
    for (const ModelConfig::Group* g : {&m.config.node_type, &m.config.edge_index, &m.config.edge_type}) {
        detail::put<std::uint32_t>(out, g->n_L);
        detail::put<std::uint32_t>(out, g->n_S);
        detail::put<std::uint32_t>(out, g->n_I);
    }
    detail::put<std::uint64_t>(out, m.circuit.units.size());
    for (const CircuitUnit& u : m.circuit.units) {
        detail::put<std::uint8_t>(out, u.kind == UnitKind::input ? 0 : u.kind == UnitKind::sum ? 1 : 2);
        if (u.kind == UnitKind::input) {
            detail::put<std::uint32_t>(out, u.var);
        } else {
            detail::put<std::uint32_t>(out, u.child_len);
            for (std::uint32_t ch : m.circuit.child_span(u)) detail::put<std::uint32_t>(out, ch);
        }
    }
    detail::put<std::uint64_t>(out, m.circuit.params.size());
    out.write(reinterpret_cast<const char*>(m.circuit.params.data()),
              static_cast<std::streamsize>(m.circuit.params.size() * sizeof(double)));
    detail::put<std::uint32_t>(out, m.cardinality.n_max);
    detail::put<std::uint32_t>(out, m.cardinality.m_max);
    out.write(reinterpret_cast<const char*>(m.cardinality.log_probs.data()),
              static_cast<std::streamsize>(m.cardinality.log_probs.size() * sizeof(double)));
    if (!out) raise(ErrorKind::data, "failed to write model file");
}

inline SpgcModel load_model(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kModelMagic, sizeof(magic)) != 0)
        raise(ErrorKind::data, "not a model file (bad magic)");
    if (detail::get<std::uint32_t>(in) != 1) raise(ErrorKind::data, "unsupported model file version");
    SpgcModel m;
    m.schema.n_max = detail::get<std::uint32_t>(in);
    m.schema.m_max = detail::get<std::uint32_t>(in);
    m.schema.n_V = detail::get<std::uint32_t>(in);
    m.schema.n_E = detail::get<std::uint32_t>(in);
    m.schema.validate();
    m.layout.schema = m.schema;
    const std::uint32_t atom_count = detail::get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < atom_count; ++i) m.atoms.push_back(detail::get_string(in));
    m.config.kind = detail::get<std::uint8_t>(in) == 0 ? RegionGraphSpec::Kind::BT : RegionGraphSpec::Kind::RT;
    m.config.n_c = detail::get<std::uint32_t>(in);
    m.config.n_R = detail::get<std::uint32_t>(in);
    m.config.seed = detail::get<std::uint64_t>(in);
    for (ModelConfig::Group* g : {&m.config.node_type, &m.config.edge_index, &m.config.edge_type}) {
        g->n_L = detail::get<std::uint32_t>(in);
        g->n_S = detail::get<std::uint32_t>(in);
        g->n_I = detail::get<std::uint32_t>(in);
    }

    Circuit& c = m.circuit;
    const auto groups = m.layout.groups();
    std::size_t var_count = m.layout.var_count();
    c.vars.resize(var_count);
    c.var_group.assign(var_count, 0);
    c.var_pos.assign(var_count, 0);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t p = 0; p < groups[g].size(); ++p) {
            c.vars[groups[g][p].index] = groups[g][p];
            c.var_group[groups[g][p].index] = static_cast<std::uint32_t>(g);
            c.var_pos[groups[g][p].index] = static_cast<std::uint32_t>(p);
        }

    const std::uint64_t unit_count = detail::get<std::uint64_t>(in);
    std::uint32_t param_off = 0;
    for (std::uint64_t i = 0; i < unit_count; ++i) {
        CircuitUnit u;
        const std::uint8_t kind = detail::get<std::uint8_t>(in);
        if (kind > 2) raise(ErrorKind::data, "model file has an invalid unit kind");
        u.kind = kind == 0 ? UnitKind::input : kind == 1 ? UnitKind::sum : UnitKind::product;
        if (u.kind == UnitKind::input) {
            u.var = detail::get<std::uint32_t>(in);
            if (u.var >= var_count) raise(ErrorKind::data, "model file input variable out of range");
            u.param_off = param_off;
            u.param_len = c.vars[u.var].domain;
            param_off += u.param_len;
            u.scope_off = static_cast<std::uint32_t>(c.scopes.size());
            u.scope_len = 1;
            c.scopes.push_back({c.var_group[u.var], c.var_pos[u.var], c.var_pos[u.var] + 1});
        } else {
            const std::uint32_t n_children = detail::get<std::uint32_t>(in);
            if (n_children == 0) raise(ErrorKind::data, "model file unit has no children");
            u.child_off = static_cast<std::uint32_t>(c.children.size());
            u.child_len = n_children;
            std::vector<ScopeInterval> merged;
            for (std::uint32_t k = 0; k < n_children; ++k) {
                const std::uint32_t ch = detail::get<std::uint32_t>(in);
                if (ch >= i) raise(ErrorKind::data, "model file children are not topologically ordered");
                c.children.push_back(ch);
                for (const ScopeInterval& s : c.scope_span(c.units[ch])) merged.push_back(s);
            }
            if (u.kind == UnitKind::sum) {
                u.param_off = param_off;
                u.param_len = n_children;
                param_off += n_children;
            }
            const std::vector<ScopeInterval> out = coalesce_intervals(std::move(merged));
            u.scope_off = static_cast<std::uint32_t>(c.scopes.size());
            u.scope_len = static_cast<std::uint32_t>(out.size());
            c.scopes.insert(c.scopes.end(), out.begin(), out.end());
        }
        c.units.push_back(u);
    }
    if (c.units.empty()) raise(ErrorKind::data, "model file has no circuit units");

    const std::uint64_t param_count = detail::get<std::uint64_t>(in);
    if (param_count != param_off) raise(ErrorKind::data, "model file parameter count mismatch");
    c.params.resize(param_count);
    in.read(reinterpret_cast<char*>(c.params.data()), static_cast<std::streamsize>(param_count * sizeof(double)));
    if (!in) raise(ErrorKind::data, "model file truncated");
    c.refresh();

    m.cardinality.n_max = detail::get<std::uint32_t>(in);
    m.cardinality.m_max = detail::get<std::uint32_t>(in);
    if (m.cardinality.n_max != m.schema.n_max || m.cardinality.m_max != m.schema.m_max)
        raise(ErrorKind::data, "model file cardinality table does not match the schema");
    m.cardinality.log_probs.resize(static_cast<std::size_t>(m.cardinality.n_max) * (m.cardinality.m_max + 1));
    in.read(reinterpret_cast<char*>(m.cardinality.log_probs.data()),
            static_cast<std::streamsize>(m.cardinality.log_probs.size() * sizeof(double)));
    if (!in) raise(ErrorKind::data, "model file truncated");
    return m;
}

inline void save_model_file(const std::string& path, const SpgcModel& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::data, "cannot open model file for writing: " + path);
    save_model(out, m);
}

inline SpgcModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::data, "cannot open model file: " + path);
    return load_model(in);
}

} // namespace spgc
