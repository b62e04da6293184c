#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spgc/model.hpp"
#include "spgc/sampler.hpp"
#include "spgc/smiles.hpp"

namespace spgc {

/// Adam settings with the experimental defaults: learning rate 0.05, decay
/// rates (0.9, 0.82), batch size 256, 40 epochs.
struct OptimizerConfig {
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.82;
    double epsilon = 1e-8;
    std::uint32_t epochs = 40;
    std::uint32_t batch_size = 256;
    std::uint64_t seed = 0;
    double smoothing = 0.0;  // additive smoothing for the cardinality fit
    std::uint32_t threads = 1; // 1 = sequential reduction (deterministic reference mode)

    void validate() const {
        if (!(learning_rate > 0)) raise(ErrorKind::config, "learning rate must be positive");
        if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
            raise(ErrorKind::config, "decay rates must lie in [0, 1)");
        if (epochs < 1 || batch_size < 1) raise(ErrorKind::config, "epochs and batch size must be >= 1");
        if (threads < 1) raise(ErrorKind::config, "threads must be >= 1");
    }
};

struct AdamState {
    std::vector<double> m, v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// Standard bias-corrected Adam update.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                      const OptimizerConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        raise(ErrorKind::config, "adam buffers have mismatched sizes");
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

struct TrainReport {
    std::vector<double> train_nll; // per-epoch mean over training items
    std::vector<double> val_nll;
    std::vector<double> seconds;
    std::vector<std::uint32_t> train_idx, val_idx, test_idx;
};

/// Seeded 80/10/10 split of dataset indices.
inline void split_dataset(std::size_t count, std::uint64_t seed, std::vector<std::uint32_t>& train,
                          std::vector<std::uint32_t>& val, std::vector<std::uint32_t>& test) {
    std::vector<std::uint32_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(derive_seed(seed, 0x73706c6974ULL));
    rng.shuffle(idx);
    const std::size_t n_train = count * 8 / 10;
    const std::size_t n_val = count / 10;
    train.assign(idx.begin(), idx.begin() + n_train);
    val.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
    test.assign(idx.begin() + n_train + n_val, idx.end());
}

inline double mean_nll(const SpgcModel& model, std::span<const SparseGraph> graphs, EvalWorkspace& ws) {
    if (graphs.empty()) raise(ErrorKind::data, "mean NLL of an empty set");
    double acc = 0.0;
    for (const SparseGraph& g : graphs) acc -= log_prob(model, g, ws);
    return acc / static_cast<double>(graphs.size());
}

inline double mean_nll(const SpgcModel& model, std::span<const SparseGraph> graphs) {
    EvalWorkspace ws;
    return mean_nll(model, graphs, ws);
}

namespace detail {

/// Mean NLL gradient over a batch of cached evidences, accumulated into
/// `grad`. Items are partitioned into fixed contiguous chunks per thread and
/// merged in thread order, so results are reproducible for a fixed thread
/// count; threads == 1 is the sequential reference mode.
inline double batch_gradient(const Circuit& c, std::span<const Evidence* const> batch,
                             std::span<const double> log_cards, std::uint32_t threads, std::vector<double>& grad,
                             std::vector<EvalWorkspace>& wss) {
    const std::size_t count = batch.size();
    grad.assign(c.param_count(), 0.0);
    double loss = 0.0;
    if (threads <= 1 || count < 2 * threads) {
        for (std::size_t i = 0; i < count; ++i) {
            loss -= backward(c, *batch[i], wss[0], grad) + log_cards[i];
        }
    } else {
        const std::uint32_t used = std::min<std::uint32_t>(threads, static_cast<std::uint32_t>(count));
        std::vector<std::vector<double>> grads(used, std::vector<double>(c.param_count(), 0.0));
        std::vector<double> losses(used, 0.0);
        wss.resize(std::max<std::size_t>(wss.size(), used));
        std::vector<std::thread> pool;
        for (std::uint32_t t = 0; t < used; ++t) {
            pool.emplace_back([&, t]() {
                const std::size_t lo = count * t / used, hi = count * (t + 1) / used;
                for (std::size_t i = lo; i < hi; ++i)
                    losses[t] -= backward(c, *batch[i], wss[t], grads[t]) + log_cards[i];
            });
        }
        for (auto& th : pool) th.join();
        for (std::uint32_t t = 0; t < used; ++t) {
            loss += losses[t];
            for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += grads[t][p];
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (double& gv : grad) gv = -gv * inv; // gradient of the mean NLL
    return loss * inv;
}

} // namespace detail

/// Maximum-likelihood training: the cardinality table is fit in closed form
/// on the training split (the joint factorizes, so the two MLE problems
/// decouple) and the circuit parameters follow Adam on the mean NLL of the
/// conditioned part. Graphs are canonicalized once on entry. Deterministic
/// for a fixed seed, config and thread count.
inline TrainReport train(SpgcModel& model, std::span<const SparseGraph> dataset, const OptimizerConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) raise(ErrorKind::data, "cannot train on an empty dataset");
    TrainReport report;
    split_dataset(dataset.size(), cfg.seed, report.train_idx, report.val_idx, report.test_idx);
    if (report.train_idx.empty()) raise(ErrorKind::data, "training split is empty");

    std::vector<SparseGraph> canon(dataset.size());
    std::vector<Evidence> evidence(dataset.size());
    std::vector<double> log_card_of(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        validate_graph(dataset[i], model.schema);
        canon[i] = canonicalize(dataset[i]).graph;
        evidence[i] = graph_to_evidence(model.layout, canon[i]);
    }
    std::vector<SparseGraph> train_graphs;
    train_graphs.reserve(report.train_idx.size());
    for (std::uint32_t i : report.train_idx) train_graphs.push_back(canon[i]);
    fit_model_cardinality(model, train_graphs, cfg.smoothing);
    for (std::size_t i = 0; i < dataset.size(); ++i)
        log_card_of[i] = model.cardinality.at(static_cast<std::uint32_t>(canon[i].node_count()),
                                              static_cast<std::uint32_t>(canon[i].edge_count()));

    std::vector<SparseGraph> val_graphs;
    for (std::uint32_t i : report.val_idx) val_graphs.push_back(canon[i]);

    AdamState state(model.circuit.param_count());
    Rng shuffle_rng(derive_seed(cfg.seed, 0x65706f6368ULL));
    std::vector<std::uint32_t> order = report.train_idx;
    std::vector<double> grad;
    std::vector<EvalWorkspace> wss(std::max<std::uint32_t>(cfg.threads, 1));
    EvalWorkspace ws;

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t items = 0;
        for (std::size_t off = 0; off < order.size(); off += cfg.batch_size) {
            const std::size_t hi = std::min<std::size_t>(off + cfg.batch_size, order.size());
            std::vector<const Evidence*> batch;
            std::vector<double> cards;
            for (std::size_t i = off; i < hi; ++i) {
                batch.push_back(&evidence[order[i]]);
                cards.push_back(log_card_of[order[i]]);
            }
            const double loss = detail::batch_gradient(model.circuit, batch, cards, cfg.threads, grad, wss);
            if (!std::isfinite(loss))
                raise(ErrorKind::numeric, "training aborted: non-finite batch loss at epoch " + std::to_string(epoch));
            epoch_loss += loss * static_cast<double>(batch.size());
            items += batch.size();
            adam_step(model.circuit.params, grad, state, cfg);
            model.circuit.refresh();
        }
        report.train_nll.push_back(epoch_loss / static_cast<double>(items));
        report.val_nll.push_back(val_graphs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                    : mean_nll(model, val_graphs, ws));
        report.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return report;
}

/// Maximum relative error between `analytic` and central finite differences
/// of the circuit log-value at the given parameter indices. The comparison
/// denominator is floored at 1e-4 so near-zero gradients stay meaningful.
inline double fd_max_rel_err(Circuit& c, const Evidence& e, std::span<const double> analytic,
                             std::span<const std::size_t> indices, double step) {
    EvalWorkspace ws;
    double worst = 0.0;
    for (std::size_t p : indices) {
        const double orig = c.params[p];
        c.params[p] = orig + step;
        c.refresh();
        const double up = evaluate(c, e, ws);
        c.params[p] = orig - step;
        c.refresh();
        const double dn = evaluate(c, e, ws);
        c.params[p] = orig;
        const double fd = (up - dn) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - analytic[p]) / std::max({std::abs(fd), std::abs(analytic[p]), 1e-4}));
    }
    c.refresh();
    return worst;
}

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    bool passed = false;
};

/// Compares backward against central finite differences of log_prob on a
/// random parameter subset. The cardinality term carries no circuit
/// parameters, so differencing the circuit value is exact for log_prob.
inline GradCheckReport grad_check(SpgcModel& model, const SparseGraph& g, double step = 1e-5, double tol = 1e-4,
                                  std::size_t max_params = 200, std::uint64_t seed = 0) {
    if (!(step > 0)) raise(ErrorKind::config, "finite-difference step must be positive");
    const SparseGraph canon = canonicalize(g).graph;
    const Evidence e = graph_to_evidence(model.layout, canon);
    std::vector<double> analytic(model.circuit.param_count(), 0.0);
    EvalWorkspace ws;
    backward(model.circuit, e, ws, analytic);
    std::vector<std::size_t> indices(model.circuit.param_count());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (indices.size() > max_params) {
        Rng rng(derive_seed(seed, 0x67636865636bULL));
        rng.shuffle(indices);
        indices.resize(max_params);
    }
    GradCheckReport r;
    r.checked = indices.size();
    r.max_rel_err = fd_max_rel_err(model.circuit, e, analytic, indices, step);
    r.passed = r.max_rel_err < tol;
    return r;
}

struct GridEntry {
    std::string name;
    ModelConfig config;
};

struct GridResult {
    std::string name;
    std::size_t index = 0;
    bool failed = false;
    std::string error;
    double val_nll = std::numeric_limits<double>::infinity();
    std::optional<double> validity;
};

/// Ranking: failures last, then highest validity, ties by lowest validation
/// NLL, ties by grid order.
inline void rank_grid_results(std::vector<GridResult>& results) {
    auto nll_key = [](const GridResult& r) {
        return std::isnan(r.val_nll) ? std::numeric_limits<double>::infinity() : r.val_nll;
    };
    std::stable_sort(results.begin(), results.end(), [&](const GridResult& a, const GridResult& b) {
        if (a.failed != b.failed) return !a.failed;
        const double va = a.validity.value_or(-1.0), vb = b.validity.value_or(-1.0);
        if (va != vb) return va > vb;
        if (nll_key(a) != nll_key(b)) return nll_key(a) < nll_key(b);
        return a.index < b.index;
    });
}

/// Trains every configuration and ranks by sampled validity (molecule
/// schemas), ties broken by validation NLL. Per-run failures are recorded
/// and do not abort the sweep.
inline std::vector<GridResult> grid_search(const DatasetSchema& schema, std::span<const SparseGraph> dataset,
                                           const std::vector<std::string>& atoms, std::span<const GridEntry> grid,
                                           const OptimizerConfig& base, std::size_t sample_count = 1000) {
    if (grid.empty()) raise(ErrorKind::config, "empty hyperparameter grid");
    std::vector<GridResult> results;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        GridResult r;
        r.name = grid[gi].name;
        r.index = gi;
        try {
            SpgcModel model = build_spgc_model(schema, grid[gi].config);
            model.atoms = atoms;
            randomize_params(model.circuit, grid[gi].config.seed);
            TrainReport report = train(model, dataset, base);
            r.val_nll = report.val_nll.empty() ? std::numeric_limits<double>::infinity() : report.val_nll.back();
            if (!atoms.empty() && sample_count > 0) {
                const AtomVocabulary vocab = AtomVocabulary::from_symbols(atoms);
                CollisionPolicy policy;
                Rng root(derive_seed(base.seed, 0x76616c6964ULL, gi));
                EvalWorkspace ws;
                std::size_t valid = 0;
                for (std::size_t i = 0; i < sample_count; ++i) {
                    Rng rng = root.split(0, i);
                    if (check_validity(sample(model, policy, rng, ws), vocab).valid) ++valid;
                }
                r.validity = static_cast<double>(valid) / static_cast<double>(sample_count);
            }
        } catch (const std::exception& ex) {
            r.failed = true;
            r.error = ex.what();
        }
        results.push_back(std::move(r));
    }
    rank_grid_results(results);
    return results;
}

} // namespace spgc
