#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spgc/error.hpp"
#include "spgc/numeric.hpp"

namespace spgc {

/// Position in the model's flattened variable sequence plus its domain size.
struct VariableId {
    std::uint32_t index = 0;
    std::uint32_t domain = 1;
};

enum class UnitKind : std::uint8_t { input, sum, product };

/// Contiguous span [lo, hi) of positions within one variable group. Unit
/// scopes are unions of such intervals; the groups come from the model
/// layout (e.g. node types / edge endpoints / edge types).
struct ScopeInterval {
    std::uint32_t group = 0;
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;
};

/// Sorts and merges intervals, coalescing adjacent spans within a group.
inline std::vector<ScopeInterval> coalesce_intervals(std::vector<ScopeInterval> merged) {
    std::sort(merged.begin(), merged.end(), [](const ScopeInterval& a, const ScopeInterval& b) {
        return a.group != b.group ? a.group < b.group : a.lo < b.lo;
    });
    std::vector<ScopeInterval> out;
    for (const ScopeInterval& s : merged) {
        if (!out.empty() && out.back().group == s.group && out.back().hi >= s.lo)
            out.back().hi = std::max(out.back().hi, s.hi);
        else
            out.push_back(s);
    }
    return out;
}

struct CircuitUnit {
    UnitKind kind = UnitKind::input;
    std::uint32_t var = 0;       // input units: model variable index
    std::uint32_t param_off = 0; // input: domain-sized block; sum: one weight per child
    std::uint32_t param_len = 0;
    std::uint32_t child_off = 0; // into Circuit::children (sum/product)
    std::uint32_t child_len = 0;
    std::uint32_t scope_off = 0; // into Circuit::scopes
    std::uint32_t scope_len = 0;
};

/// Smooth, decomposable circuit over categorical variables, units in
/// topological order with the root last. Parameters are stored unconstrained;
/// `log_norm` caches their per-block log-softmax and must be refreshed after
/// any parameter change (refresh()). Structure and cached parameters are
/// immutable during evaluation, so evaluate/backward/sampling are reentrant.
struct Circuit {
    std::vector<VariableId> vars;
    std::vector<std::uint32_t> var_group; // variable index -> group
    std::vector<std::uint32_t> var_pos;   // variable index -> position within its group
    std::vector<CircuitUnit> units;
    std::vector<std::uint32_t> children;
    std::vector<ScopeInterval> scopes;
    std::vector<double> params;
    std::vector<double> log_norm;

    std::uint32_t root() const { return static_cast<std::uint32_t>(units.size()) - 1; }
    std::size_t unit_count() const { return units.size(); }
    std::size_t param_count() const { return params.size(); }

    std::span<const std::uint32_t> child_span(const CircuitUnit& u) const {
        return {children.data() + u.child_off, u.child_len};
    }
    std::span<const ScopeInterval> scope_span(const CircuitUnit& u) const {
        return {scopes.data() + u.scope_off, u.scope_len};
    }
    std::span<const double> unit_log_norm(const CircuitUnit& u) const {
        return {log_norm.data() + u.param_off, u.param_len};
    }

    bool scope_contains(const CircuitUnit& u, std::uint32_t var) const {
        const std::uint32_t g = var_group[var], p = var_pos[var];
        for (const ScopeInterval& s : scope_span(u))
            if (s.group == g && s.lo <= p && p < s.hi) return true;
        return false;
    }

    /// Recompute the normalized log-parameter cache.
    void refresh() {
        log_norm.resize(params.size());
        for (const CircuitUnit& u : units) {
            if (u.param_len == 0) continue;
            log_softmax({params.data() + u.param_off, u.param_len}, {log_norm.data() + u.param_off, u.param_len});
        }
    }
};

/// Per-variable observation state: a category index, or marginalized.
class Evidence {
public:
    Evidence() = default;
    explicit Evidence(std::size_t var_count) : vals_(var_count, kMarginalized) {}

    static Evidence all_marginalized(std::size_t var_count) { return Evidence(var_count); }

    void observe(std::size_t var, std::int32_t value) { vals_[var] = value; }
    void marginalize(std::size_t var) { vals_[var] = kMarginalized; }
    bool observed(std::size_t var) const { return vals_[var] >= 0; }
    std::int32_t value(std::size_t var) const { return vals_[var]; }
    std::size_t size() const { return vals_.size(); }

    static constexpr std::int32_t kMarginalized = -1;

private:
    std::vector<std::int32_t> vals_;
};

/// Reusable buffers for evaluate/backward.
struct EvalWorkspace {
    std::vector<double> value; // forward log-values per unit
    std::vector<double> back;  // log d(root)/d(unit) per unit
    std::vector<double> tmp;
};

/// Feed-forward log-space evaluation. Marginalized inputs contribute log 1;
/// a sum whose children are all exactly 0.0 is itself exactly 0.0 (its
/// normalized weights sum to one by construction), so a fully marginalized
/// query returns 0.0 exactly. -inf propagates cleanly and never produces NaN.
inline double evaluate(const Circuit& c, const Evidence& e, EvalWorkspace& ws) {
    if (e.size() != c.vars.size()) raise(ErrorKind::data, "evidence size does not match circuit");
    ws.value.resize(c.units.size());
    for (std::size_t i = 0; i < c.units.size(); ++i) {
        const CircuitUnit& u = c.units[i];
        double v;
        switch (u.kind) {
        case UnitKind::input:
            if (e.observed(u.var)) {
                const auto x = static_cast<std::uint32_t>(e.value(u.var));
                if (x >= u.param_len) raise(ErrorKind::data, "observed value outside the variable domain");
                v = c.log_norm[u.param_off + x];
            } else {
                v = 0.0;
            }
            break;
        case UnitKind::product: {
            v = 0.0;
            for (std::uint32_t ch : c.child_span(u)) v += ws.value[ch];
            break;
        }
        case UnitKind::sum: {
            auto ch = c.child_span(u);
            bool all_unit = true;
            double m = kNegInf;
            for (std::size_t k = 0; k < ch.size(); ++k) {
                double t = c.log_norm[u.param_off + k] + ws.value[ch[k]];
                all_unit = all_unit && ws.value[ch[k]] == 0.0;
                m = std::max(m, t);
            }
            if (all_unit) {
                v = 0.0;
            } else if (m == kNegInf) {
                v = kNegInf;
            } else {
                double s = 0.0;
                for (std::size_t k = 0; k < ch.size(); ++k)
                    s += std::exp(c.log_norm[u.param_off + k] + ws.value[ch[k]] - m);
                v = m + std::log(s);
            }
            break;
        }
        default:
            v = kNegInf;
        }
        ws.value[i] = v;
    }
    return ws.value[c.root()];
}

inline double evaluate(const Circuit& c, const Evidence& e) {
    EvalWorkspace ws;
    return evaluate(c, e, ws);
}

/// d log c(e) / d theta for every unconstrained parameter (sum weights and
/// input categorical logits under the softmax mapping), accumulated into
/// `grad` (caller zeroes it). Runs a forward pass first. Evidence with
/// likelihood -inf has no defined gradient and raises a numeric error.
inline double backward(const Circuit& c, const Evidence& e, EvalWorkspace& ws, std::span<double> grad) {
    if (grad.size() != c.params.size()) raise(ErrorKind::data, "gradient buffer size mismatch");
    const double root_val = evaluate(c, e, ws);
    if (root_val == kNegInf) raise(ErrorKind::numeric, "gradient undefined: evidence has zero likelihood");
    ws.back.assign(c.units.size(), kNegInf);
    ws.back[c.root()] = 0.0;
    for (std::size_t i = c.units.size(); i-- > 0;) {
        const CircuitUnit& u = c.units[i];
        const double b = ws.back[i];
        if (u.kind == UnitKind::input) {
            if (b == kNegInf) continue;
            if (!e.observed(u.var)) continue; // marginalized input is constant 1 under softmax
            const double s = std::exp(b + ws.value[i] - root_val); // posterior mass through this unit
            const std::uint32_t x = static_cast<std::uint32_t>(e.value(u.var));
            grad[u.param_off + x] += s;
            for (std::uint32_t k = 0; k < u.param_len; ++k)
                grad[u.param_off + k] -= s * std::exp(c.log_norm[u.param_off + k]);
            continue;
        }
        auto ch = c.child_span(u);
        if (u.kind == UnitKind::sum) {
            for (std::size_t k = 0; k < ch.size(); ++k) {
                const double lw = c.log_norm[u.param_off + k];
                if (b != kNegInf) {
                    // d log c / d theta_k = exp(b+lw+F_k-F_root) - exp(b+lw+F_u-F_root)
                    grad[u.param_off + k] += std::exp(b + lw + ws.value[ch[k]] - root_val) -
                                             std::exp(b + lw + ws.value[i] - root_val);
                    ws.back[ch[k]] = log_add(ws.back[ch[k]], b + lw);
                }
            }
        } else { // product
            if (b == kNegInf) continue;
            int inf_count = 0;
            double finite_sum = 0.0;
            for (std::uint32_t k : ch) {
                if (ws.value[k] == kNegInf)
                    ++inf_count;
                else
                    finite_sum += ws.value[k];
            }
            if (inf_count >= 2) continue;
            for (std::uint32_t k : ch) {
                if (inf_count == 1) {
                    if (ws.value[k] == kNegInf) ws.back[k] = log_add(ws.back[k], b + finite_sum);
                } else {
                    ws.back[k] = log_add(ws.back[k], b + finite_sum - ws.value[k]);
                }
            }
        }
    }
    return root_val;
}

} // namespace spgc
