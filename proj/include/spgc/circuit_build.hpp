#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spgc/circuit.hpp"
#include "spgc/rng.hpp"

namespace spgc {

/// Region-graph settings. BT splits each variable span at the midpoint; RT
/// splits at a uniformly random feasible point, independently per repetition
/// (seeded, no parameter sharing across repetitions). n_L counts layers of
/// the region tree (n_L == 1 means input units only), n_S is the number of
/// children of each sum unit, n_I the number of input units per variable,
/// n_R the repetition count (BT uses 1), n_c the number of children of the
/// top-level sum.
struct RegionGraphSpec {
    enum class Kind : std::uint8_t { BT, RT };
    Kind kind = Kind::BT;
    std::uint32_t n_L = 1;
    std::uint32_t n_S = 1;
    std::uint32_t n_I = 1;
    std::uint32_t n_R = 1;
    std::uint32_t n_c = 1;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (n_L < 1 || n_S < 1 || n_I < 1 || n_R < 1 || n_c < 1)
            raise(ErrorKind::config, "region graph counts must all be >= 1");
    }
};

namespace detail {

class CircuitBuilder {
public:
    explicit CircuitBuilder(Circuit& c) : c_(c) {}

    std::uint32_t add_input(std::uint32_t var, std::uint32_t domain, std::uint32_t group, std::uint32_t pos) {
        CircuitUnit u;
        u.kind = UnitKind::input;
        u.var = var;
        u.param_off = alloc_params(domain);
        u.param_len = domain;
        u.scope_off = static_cast<std::uint32_t>(c_.scopes.size());
        c_.scopes.push_back({group, pos, pos + 1});
        u.scope_len = 1;
        return push(u);
    }

    std::uint32_t add_product(std::span<const std::uint32_t> kids) {
        CircuitUnit u;
        u.kind = UnitKind::product;
        set_children(u, kids);
        set_union_scope(u, kids);
        return push(u);
    }

    std::uint32_t add_sum(std::span<const std::uint32_t> kids) {
        CircuitUnit u;
        u.kind = UnitKind::sum;
        set_children(u, kids);
        u.param_off = alloc_params(static_cast<std::uint32_t>(kids.size()));
        u.param_len = static_cast<std::uint32_t>(kids.size());
        set_union_scope(u, kids);
        return push(u);
    }

private:
    std::uint32_t push(const CircuitUnit& u) {
        c_.units.push_back(u);
        return static_cast<std::uint32_t>(c_.units.size()) - 1;
    }

    std::uint32_t alloc_params(std::uint32_t len) {
        std::uint32_t off = static_cast<std::uint32_t>(c_.params.size());
        c_.params.resize(c_.params.size() + len, 0.0);
        return off;
    }

    void set_children(CircuitUnit& u, std::span<const std::uint32_t> kids) {
        u.child_off = static_cast<std::uint32_t>(c_.children.size());
        u.child_len = static_cast<std::uint32_t>(kids.size());
        c_.children.insert(c_.children.end(), kids.begin(), kids.end());
    }

    void set_union_scope(CircuitUnit& u, std::span<const std::uint32_t> kids) {
        std::vector<ScopeInterval> merged;
        for (std::uint32_t k : kids)
            for (const ScopeInterval& s : c_.scope_span(c_.units[k])) merged.push_back(s);
        std::vector<ScopeInterval> out = coalesce_intervals(std::move(merged));
        u.scope_off = static_cast<std::uint32_t>(c_.scopes.size());
        u.scope_len = static_cast<std::uint32_t>(out.size());
        c_.scopes.insert(c_.scopes.end(), out.begin(), out.end());
    }

    Circuit& c_;
};

/// Builds the region tree over group positions [lo, hi); returns the
/// region's unit ids (width n_I at leaves, n_S elsewhere).
inline std::vector<std::uint32_t> build_region(CircuitBuilder& b, const Circuit& c, const RegionGraphSpec& spec,
                                               std::span<const std::uint32_t> group_vars, std::uint32_t group,
                                               std::uint32_t lo, std::uint32_t hi, std::uint32_t depth, Rng& rng) {
    const std::uint32_t len = hi - lo;
    if (depth + 1 == spec.n_L) {
        // leaf region: n_I factorized units over the span
        std::vector<std::uint32_t> units;
        if (len == 1) {
            for (std::uint32_t i = 0; i < spec.n_I; ++i)
                units.push_back(b.add_input(group_vars[lo], c.vars[group_vars[lo]].domain, group, lo));
            return units;
        }
        std::vector<std::vector<std::uint32_t>> per_var(len);
        for (std::uint32_t v = 0; v < len; ++v)
            for (std::uint32_t i = 0; i < spec.n_I; ++i)
                per_var[v].push_back(b.add_input(group_vars[lo + v], c.vars[group_vars[lo + v]].domain, group, lo + v));
        for (std::uint32_t i = 0; i < spec.n_I; ++i) {
            std::vector<std::uint32_t> kids;
            kids.reserve(len);
            for (std::uint32_t v = 0; v < len; ++v) kids.push_back(per_var[v][i]);
            units.push_back(b.add_product(kids));
        }
        return units;
    }
    // internal region: split the span, pair child units into n_S products,
    // then mix them with n_S sums (fan-in n_S each)
    const std::uint32_t rem = spec.n_L - 1 - depth;      // splits still to perform including this one
    const std::uint32_t need = 1u << (rem - 1);          // minimum feasible child span
    std::uint32_t split;
    if (spec.kind == RegionGraphSpec::Kind::BT) {
        split = (len + 1) / 2;
        split = std::max(split, need);
        split = std::min(split, len - need);
    } else {
        split = need + static_cast<std::uint32_t>(rng.bounded(len - 2 * need + 1));
    }
    auto left = build_region(b, c, spec, group_vars, group, lo, lo + split, depth + 1, rng);
    auto right = build_region(b, c, spec, group_vars, group, lo + split, hi, depth + 1, rng);
    std::vector<std::uint32_t> prods;
    prods.reserve(spec.n_S);
    for (std::uint32_t j = 0; j < spec.n_S; ++j) {
        std::uint32_t kids[2] = {left[j % left.size()], right[j % right.size()]};
        prods.push_back(b.add_product(kids));
    }
    std::vector<std::uint32_t> sums;
    sums.reserve(spec.n_S);
    for (std::uint32_t j = 0; j < spec.n_S; ++j) sums.push_back(b.add_sum(prods));
    return sums;
}

} // namespace detail

/// Builds a smooth, decomposable circuit over several variable groups, each
/// with its own (n_L, n_S, n_I); kind, n_R, n_c and seed are shared and must
/// agree across the specs. Group sub-circuits are built per repetition and
/// joined under the top-level sum: child k of the root takes repetition
/// k mod n_R and one unit per group chosen by mixed-radix enumeration, so
/// children sweep distinct cross-group combinations. Empty groups are
/// skipped.
inline Circuit build_grouped_circuit(std::span<const RegionGraphSpec> specs,
                                     std::span<const std::vector<VariableId>> groups) {
    if (specs.size() != groups.size() || specs.empty())
        raise(ErrorKind::config, "need one region spec per variable group");
    for (const RegionGraphSpec& s : specs) {
        s.validate();
        if (s.kind != specs[0].kind || s.n_R != specs[0].n_R || s.n_c != specs[0].n_c ||
            s.rng_seed != specs[0].rng_seed)
            raise(ErrorKind::config, "kind, n_R, n_c and seed must match across groups");
    }
    const std::uint32_t n_R = specs[0].kind == RegionGraphSpec::Kind::BT ? 1 : specs[0].n_R;
    const std::uint32_t n_c = specs[0].n_c;

    Circuit c;
    std::size_t var_count = 0;
    for (const auto& g : groups)
        for (const VariableId& v : g) var_count = std::max(var_count, static_cast<std::size_t>(v.index) + 1);
    c.vars.resize(var_count);
    c.var_group.assign(var_count, 0);
    c.var_pos.assign(var_count, 0);
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t p = 0; p < groups[g].size(); ++p) {
            const VariableId& v = groups[g][p];
            if (v.domain < 1) raise(ErrorKind::config, "variable domain must be >= 1");
            c.vars[v.index] = v;
            c.var_group[v.index] = static_cast<std::uint32_t>(g);
            c.var_pos[v.index] = static_cast<std::uint32_t>(p);
            ++assigned;
        }
    }
    if (assigned != var_count) raise(ErrorKind::config, "groups must cover a contiguous variable index range");

    detail::CircuitBuilder b(c);
    // top units per (group, repetition)
    std::vector<std::vector<std::vector<std::uint32_t>>> tops(groups.size());
    std::vector<std::size_t> active;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) continue;
        const RegionGraphSpec& spec = specs[g];
        const std::uint32_t len = static_cast<std::uint32_t>(groups[g].size());
        if (spec.n_L > 1 && (1u << (spec.n_L - 1)) > len)
            raise(ErrorKind::config, "n_L=" + std::to_string(spec.n_L) + " too deep for a group of " +
                                         std::to_string(len) + " variables");
        std::vector<std::uint32_t> group_vars;
        group_vars.reserve(len);
        for (const VariableId& v : groups[g]) group_vars.push_back(v.index);
        tops[g].resize(n_R);
        for (std::uint32_t r = 0; r < n_R; ++r) {
            Rng rng(derive_seed(spec.rng_seed, static_cast<std::uint64_t>(g), r));
            tops[g][r] = detail::build_region(b, c, spec, group_vars, static_cast<std::uint32_t>(g), 0, len, 0, rng);
        }
        active.push_back(g);
    }
    if (active.empty()) raise(ErrorKind::config, "no variables to build a circuit over");

    std::vector<std::uint32_t> root_kids;
    root_kids.reserve(n_c);
    for (std::uint32_t k = 0; k < n_c; ++k) {
        const std::uint32_t r = k % n_R;
        std::uint64_t q = k / n_R;
        std::vector<std::uint32_t> combo;
        combo.reserve(active.size());
        for (std::size_t g : active) {
            const auto& top = tops[g][r];
            combo.push_back(top[q % top.size()]);
            q /= top.size();
        }
        root_kids.push_back(combo.size() == 1 ? combo[0] : b.add_product(combo));
    }
    b.add_sum(root_kids);
    c.refresh();
    return c;
}

/// Single-group convenience form.
inline Circuit build_circuit(const RegionGraphSpec& spec, const std::vector<VariableId>& vars) {
    std::vector<RegionGraphSpec> specs{spec};
    std::vector<std::vector<VariableId>> groups{vars};
    return build_grouped_circuit(specs, groups);
}

/// Seeded i.i.d. normal initialization of the unconstrained parameters.
inline void randomize_params(Circuit& c, std::uint64_t seed, double scale = 0.1) {
    Rng rng(derive_seed(seed, 0x7061726131ULL));
    for (double& p : c.params) p = scale * rng.normal();
    c.refresh();
}

} // namespace spgc
