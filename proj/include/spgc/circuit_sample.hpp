#pragma once

#include <cstdint>
#include <vector>

#include "spgc/circuit.hpp"
#include "spgc/rng.hpp"

namespace spgc {

/// Record of one top-down pass: the complete assignment, the child picked at
/// every visited sum, and the input unit that produced each variable's value.
struct SampleTrace {
    std::vector<std::int32_t> assignment;    // per variable
    std::vector<std::int32_t> sum_choice;    // per unit: child ordinal, -1 if not visited / not a sum
    std::vector<std::int32_t> input_of_var;  // per variable: input unit id, -1 if unset
};

/// Per-variable draw restriction: if limit[v] >= 0, draws for v are
/// restricted to [0, limit[v]) and renormalized at the input unit.
using DrawLimits = std::vector<std::int32_t>;

namespace detail {

inline std::size_t draw_restricted(std::span<const double> log_probs, std::int32_t limit, Rng& rng,
                                   std::vector<double>& tmp) {
    if (limit < 0 || static_cast<std::size_t>(limit) >= log_probs.size())
        return rng.categorical_from_log(log_probs);
    tmp.assign(log_probs.begin(), log_probs.begin() + limit);
    return rng.categorical_from_log(tmp);
}

} // namespace detail

/// Ancestral sampling from p(. | e). Runs one forward pass under e, then
/// descends from the root: sums draw a child with probability proportional
/// to exp(log-weight + child log-value), products descend into all children,
/// inputs keep observed values and draw marginalized ones from their
/// (optionally restricted) categorical. Smoothness/decomposability guarantee
/// exactly one input unit is reached per variable, so the result is a
/// complete assignment.
inline SampleTrace sample_topdown(const Circuit& c, const Evidence& e, Rng& rng, EvalWorkspace& ws,
                                  const DrawLimits* limits = nullptr) {
    const double root_val = evaluate(c, e, ws);
    if (root_val == kNegInf) raise(ErrorKind::numeric, "cannot sample: evidence has zero likelihood");
    SampleTrace tr;
    tr.assignment.assign(c.vars.size(), -1);
    tr.sum_choice.assign(c.units.size(), -1);
    tr.input_of_var.assign(c.vars.size(), -1);

    std::vector<std::uint32_t> stack{c.root()};
    std::vector<double> weights;
    while (!stack.empty()) {
        const std::uint32_t id = stack.back();
        stack.pop_back();
        const CircuitUnit& u = c.units[id];
        switch (u.kind) {
        case UnitKind::input: {
            tr.input_of_var[u.var] = static_cast<std::int32_t>(id);
            if (e.observed(u.var)) {
                tr.assignment[u.var] = e.value(u.var);
            } else {
                const std::int32_t lim = limits ? (*limits)[u.var] : -1;
                tr.assignment[u.var] =
                    static_cast<std::int32_t>(detail::draw_restricted(c.unit_log_norm(u), lim, rng, ws.tmp));
            }
            break;
        }
        case UnitKind::product:
            for (std::uint32_t ch : c.child_span(u)) stack.push_back(ch);
            break;
        case UnitKind::sum: {
            auto ch = c.child_span(u);
            weights.resize(ch.size());
            for (std::size_t k = 0; k < ch.size(); ++k)
                weights[k] = c.log_norm[u.param_off + k] + ws.value[ch[k]];
            const std::size_t pick = rng.categorical_from_log(weights);
            tr.sum_choice[id] = static_cast<std::int32_t>(pick);
            stack.push_back(ch[pick]);
            break;
        }
        }
    }
    return tr;
}

/// Normalized log-probabilities of the input unit selected for `var` by the
/// branch decisions of an in-progress top-down pass, restricted to `allowed`
/// and renormalized. Raises a numeric error if the allowed set carries zero
/// mass (callers fall back per their policy).
inline std::vector<double> restricted_input_distribution(const Circuit& c, const SampleTrace& trace,
                                                         std::uint32_t var, std::span<const std::uint32_t> allowed) {
    if (allowed.empty()) raise(ErrorKind::numeric, "restricted distribution over empty category set");
    std::uint32_t id = c.root();
    for (;;) {
        const CircuitUnit& u = c.units[id];
        if (u.kind == UnitKind::input) {
            if (u.var != var) raise(ErrorKind::data, "trace does not cover the requested variable");
            break;
        }
        if (u.kind == UnitKind::sum) {
            const std::int32_t pick = trace.sum_choice[id];
            if (pick < 0) raise(ErrorKind::data, "trace has no decision for a sum on the path");
            id = c.child_span(u)[static_cast<std::size_t>(pick)];
            continue;
        }
        bool found = false;
        for (std::uint32_t ch : c.child_span(u)) {
            if (c.scope_contains(c.units[ch], var)) {
                id = ch;
                found = true;
                break;
            }
        }
        if (!found) raise(ErrorKind::data, "variable is outside the circuit scope");
    }
    auto lp = c.unit_log_norm(c.units[id]);
    std::vector<double> masked(lp.size(), kNegInf);
    double z = kNegInf;
    for (std::uint32_t a : allowed) {
        masked[a] = lp[a];
        z = log_add(z, lp[a]);
    }
    if (z == kNegInf) raise(ErrorKind::numeric, "restricted distribution has zero mass");
    std::vector<double> out;
    out.reserve(allowed.size());
    for (std::uint32_t a : allowed) out.push_back(masked[a] - z);
    return out;
}

} // namespace spgc
