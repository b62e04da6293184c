#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>

#include "spgc/smiles.hpp"

namespace spgc {

/// Validity / uniqueness / novelty with explicit undefined states: when no
/// sample is valid, uniqueness and novelty are flagged undefined rather than
/// coerced to zero.
struct MetricsReport {
    std::size_t total = 0;
    std::size_t valid = 0;
    std::size_t unique_count = 0;
    std::size_t novel_count = 0;
    std::size_t valence_failures = 0;
    std::size_t disconnected_failures = 0;
    std::size_t unknown_type_failures = 0;
    std::optional<double> validity;
    std::optional<double> uniqueness;
    std::optional<double> novelty;
};

/// validity = valid/total; uniqueness = distinct canonical strings among
/// valid / valid; novelty = unique strings absent from the training set's
/// canonical strings / unique.
inline MetricsReport compute_metrics(std::span<const SparseGraph> samples, std::span<const SparseGraph> training,
                                     const AtomVocabulary& vocab) {
    MetricsReport r;
    r.total = samples.size();
    std::set<std::string> unique;
    for (const SparseGraph& g : samples) {
        const ValidityResult v = check_validity(g, vocab);
        if (!v.valid) {
            switch (v.reason) {
            case ValidityResult::Reason::valence_exceeded: ++r.valence_failures; break;
            case ValidityResult::Reason::disconnected: ++r.disconnected_failures; break;
            default: ++r.unknown_type_failures; break;
            }
            continue;
        }
        ++r.valid;
        unique.insert(to_smiles(g, vocab));
    }
    r.unique_count = unique.size();
    if (r.total > 0) r.validity = static_cast<double>(r.valid) / static_cast<double>(r.total);
    if (r.valid > 0) {
        r.uniqueness = static_cast<double>(r.unique_count) / static_cast<double>(r.valid);
        std::set<std::string> train_canon;
        for (const SparseGraph& g : training)
            if (check_validity(g, vocab).valid) train_canon.insert(to_smiles(g, vocab));
        for (const std::string& s : unique)
            if (!train_canon.count(s)) ++r.novel_count;
        if (r.unique_count > 0)
            r.novelty = static_cast<double>(r.novel_count) / static_cast<double>(r.unique_count);
    }
    return r;
}

} // namespace spgc
