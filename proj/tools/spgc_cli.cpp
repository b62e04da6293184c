// spgc: command-line front end for the sparse probabilistic graph circuit
// library. Subcommands: ingest, stats, train, eval-nll, sample, cond-sample,
// metrics, grid, bench, grad-check. Exit codes: 0 success, 1 usage error,
// 2 data/schema error, 3 numerical failure.
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spgc/bench.hpp"
#include "spgc/dataset_io.hpp"
#include "spgc/metrics.hpp"
#include "spgc/sampler.hpp"
#include "spgc/serialize.hpp"
#include "spgc/trainer.hpp"

namespace {

using nlohmann::json;
using namespace spgc;

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json json_number(double v) {
    if (std::isfinite(v)) return v;
    return fmt_double(v); // JSON has no infinities; encode as a string
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::data, "cannot open input file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::data, "cannot open output file: " + path);
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrorKind::data, path + ": invalid JSON: " + e.what());
    }
}

ModelConfig::Group group_from_json(const json& j, const ModelConfig::Group& defaults) {
    ModelConfig::Group g = defaults;
    if (j.contains("n_L")) g.n_L = j["n_L"].get<std::uint32_t>();
    if (j.contains("n_S")) g.n_S = j["n_S"].get<std::uint32_t>();
    if (j.contains("n_I")) g.n_I = j["n_I"].get<std::uint32_t>();
    return g;
}

ModelConfig model_config_from_json(const json& cfg) {
    ModelConfig mc;
    if (!cfg.contains("circuit")) return mc;
    const json& c = cfg["circuit"];
    if (c.contains("kind")) {
        const std::string k = c["kind"].get<std::string>();
        if (k == "BT")
            mc.kind = RegionGraphSpec::Kind::BT;
        else if (k == "RT")
            mc.kind = RegionGraphSpec::Kind::RT;
        else
            raise(ErrorKind::config, "circuit.kind must be BT or RT");
    }
    if (c.contains("n_c")) mc.n_c = c["n_c"].get<std::uint32_t>();
    if (c.contains("n_R")) mc.n_R = c["n_R"].get<std::uint32_t>();
    if (c.contains("seed")) mc.seed = c["seed"].get<std::uint64_t>();
    if (c.contains("node_type")) mc.node_type = group_from_json(c["node_type"], mc.node_type);
    if (c.contains("edge_index")) mc.edge_index = group_from_json(c["edge_index"], mc.edge_index);
    if (c.contains("edge_type")) mc.edge_type = group_from_json(c["edge_type"], mc.edge_type);
    return mc;
}

OptimizerConfig optimizer_from_json(const json& cfg) {
    OptimizerConfig oc;
    if (!cfg.contains("train")) return oc;
    const json& t = cfg["train"];
    if (t.contains("learning_rate")) oc.learning_rate = t["learning_rate"].get<double>();
    if (t.contains("beta1")) oc.beta1 = t["beta1"].get<double>();
    if (t.contains("beta2")) oc.beta2 = t["beta2"].get<double>();
    if (t.contains("epsilon")) oc.epsilon = t["epsilon"].get<double>();
    if (t.contains("epochs")) oc.epochs = t["epochs"].get<std::uint32_t>();
    if (t.contains("batch_size")) oc.batch_size = t["batch_size"].get<std::uint32_t>();
    if (t.contains("seed")) oc.seed = t["seed"].get<std::uint64_t>();
    if (t.contains("smoothing")) oc.smoothing = t["smoothing"].get<double>();
    if (t.contains("threads")) oc.threads = t["threads"].get<std::uint32_t>();
    return oc;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in = open_input(path);
    return read_dataset_jsonl(in);
}

SparseGraph sorted_copy(const SparseGraph& g) {
    SparseGraph s = g;
    std::sort(s.edges.begin(), s.edges.end(),
              [](const EdgeRecord& a, const EdgeRecord& b) { return a.src != b.src ? a.src < b.src : a.dst < b.dst; });
    return s;
}

void emit_samples(std::ostream& out, const std::vector<SparseGraph>& graphs, bool as_smiles,
                  const std::vector<std::string>& atoms) {
    if (!as_smiles) {
        for (const SparseGraph& g : graphs) out << graph_to_json(sorted_copy(g)).dump() << '\n';
        return;
    }
    if (atoms.empty()) raise(ErrorKind::data, "model carries no atom vocabulary; cannot emit SMILES");
    const AtomVocabulary vocab = AtomVocabulary::from_symbols(atoms);
    for (const SparseGraph& g : graphs) {
        const ValidityResult v = check_validity(g, vocab);
        if (!v.valid) {
            out << "# invalid sample ("
                << (v.reason == ValidityResult::Reason::disconnected ? "disconnected" : "valence") << ")\n";
        } else {
            out << to_smiles(g, vocab) << '\n';
        }
    }
}

std::vector<SparseGraph> load_samples(const std::string& path, const std::vector<std::string>& atoms) {
    std::ifstream in = open_input(path);
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    if (!first.empty() && first[0] == '{') {
        // JSONL: either a full dataset (header first) or bare graph lines
        if (first.find("\"schema\"") != std::string::npos) return read_dataset_jsonl(in).graphs;
        std::vector<SparseGraph> graphs;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                SparseGraph g = graph_from_json(json::parse(line));
                validate_graph(g);
                graphs.push_back(std::move(g));
            } catch (const json::exception& e) {
                raise(ErrorKind::data, "line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
            }
        }
        return graphs;
    }
    // SMILES lines mapped through the dataset vocabulary
    if (atoms.empty()) raise(ErrorKind::data, "SMILES samples need a molecule training dataset for the vocabulary");
    const AtomVocabulary vocab = AtomVocabulary::from_symbols(atoms);
    std::vector<SparseGraph> graphs;
    for (const std::string& s : read_smiles_lines(in)) graphs.push_back(parse_smiles(s, vocab));
    return graphs;
}

// ---- subcommand implementations -----------------------------------------

int cmd_ingest(const std::string& input, const std::string& output) {
    std::ifstream in = open_input(input);
    Dataset ds = ingest_smiles(read_smiles_lines(in));
    if (output.empty() || output == "-") {
        write_dataset_jsonl(std::cout, ds);
    } else {
        std::ofstream out = open_output(output);
        write_dataset_jsonl(out, ds);
    }
    std::cerr << "ingested " << ds.graphs.size() << " molecules (n_max=" << ds.schema.n_max
              << ", m_max=" << ds.schema.m_max << ", n_V=" << ds.schema.n_V << ", n_E=" << ds.schema.n_E << ")\n";
    return 0;
}

int cmd_stats(const std::vector<std::string>& inputs) {
    std::cout << "dataset,instances,n_max,m_max,n_V,n_E\n";
    for (const std::string& path : inputs) {
        Dataset ds;
        if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") {
            ds = load_dataset(path);
            // recompute the observed statistics rather than trusting the header
            std::uint32_t n_max = 1, m_max = 0, max_t = 0, max_e = 0;
            for (const SparseGraph& g : ds.graphs) {
                n_max = std::max(n_max, static_cast<std::uint32_t>(g.node_count()));
                m_max = std::max(m_max, static_cast<std::uint32_t>(g.edge_count()));
                for (NodeType t : g.nodes) max_t = std::max(max_t, t);
                for (const EdgeRecord& e : g.edges) max_e = std::max(max_e, e.etype);
            }
            ds.schema = {n_max, m_max, max_t + 1, max_e + 1};
        } else {
            std::ifstream in = open_input(path);
            ds = ingest_smiles(read_smiles_lines(in));
        }
        std::cout << std::filesystem::path(path).stem().string() << ',' << ds.graphs.size() << ','
                  << ds.schema.n_max << ',' << ds.schema.m_max << ',' << ds.schema.n_V << ',' << ds.schema.n_E
                  << '\n';
    }
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& config_path, const std::string& model_out,
              const std::string& log_out, const json& overrides) {
    Dataset ds = load_dataset(data_path);
    json cfg = config_path.empty() ? json::object() : load_json_file(config_path);
    for (auto it = overrides.begin(); it != overrides.end(); ++it) cfg["train"][it.key()] = it.value();
    ModelConfig mc = model_config_from_json(cfg);
    OptimizerConfig oc = optimizer_from_json(cfg);
    SpgcModel model = build_spgc_model(ds.schema, mc);
    model.atoms = ds.atoms;
    randomize_params(model.circuit, mc.seed);
    TrainReport report = train(model, ds.graphs, oc);
    if (!model_out.empty()) save_model_file(model_out, model);
    if (!log_out.empty()) {
        std::ofstream log = open_output(log_out);
        log << "epoch,train_nll,val_nll,seconds\n";
        for (std::size_t e = 0; e < report.train_nll.size(); ++e)
            log << e + 1 << ',' << fmt_double(report.train_nll[e]) << ',' << fmt_double(report.val_nll[e]) << ','
                << fmt_double(report.seconds[e]) << '\n';
    }
    double test_nll = std::numeric_limits<double>::quiet_NaN();
    if (!report.test_idx.empty()) {
        std::vector<SparseGraph> test;
        for (std::uint32_t i : report.test_idx) test.push_back(ds.graphs[i]);
        test_nll = mean_nll(model, test);
    }
    json out;
    out["epochs"] = report.train_nll.size();
    out["train_size"] = report.train_idx.size();
    out["val_size"] = report.val_idx.size();
    out["test_size"] = report.test_idx.size();
    out["final_train_nll"] = json_number(report.train_nll.back());
    out["final_val_nll"] = json_number(report.val_nll.back());
    out["test_nll"] = json_number(test_nll);
    std::cout << out.dump() << '\n';
    double total = 0.0;
    for (double s : report.seconds) total += s;
    std::cerr << "trained " << report.train_nll.size() << " epochs in " << fmt_double(total) << " s\n";
    return 0;
}

int cmd_eval_nll(const std::string& model_path, const std::string& data_path) {
    SpgcModel model = load_model_file(model_path);
    Dataset ds = load_dataset(data_path);
    if (!(ds.schema == model.schema)) raise(ErrorKind::data, "dataset schema does not match the model");
    json out;
    out["count"] = ds.graphs.size();
    out["mean_nll"] = json_number(mean_nll(model, ds.graphs));
    std::cout << out.dump() << '\n';
    return 0;
}

int cmd_sample(const std::string& model_path, std::uint64_t count, std::uint64_t seed, bool smiles,
               std::uint32_t max_retries, const std::string& out_path, const std::string& substructure) {
    SpgcModel model = load_model_file(model_path);
    CollisionPolicy policy;
    policy.max_retries = max_retries;
    SubstructureEvidence sub;
    if (!substructure.empty()) {
        if (model.atoms.empty()) raise(ErrorKind::data, "model carries no atom vocabulary; cannot parse SMILES");
        const AtomVocabulary vocab = AtomVocabulary::from_symbols(model.atoms);
        sub = SubstructureEvidence::from_graph(canonicalize(parse_smiles(substructure, vocab)).graph);
    }
    SampleStats stats;
    EvalWorkspace ws;
    Rng root(seed);
    std::vector<SparseGraph> graphs;
    graphs.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Rng rng = root.split(0x73616d70ULL, i);
        SparseGraph g = sample_conditional(model, sub, policy, rng, ws, &stats);
        for (std::uint32_t j = 0; j < sub.l(); ++j) {
            if (!(g.edges[j] == sub.edges[j])) raise(ErrorKind::numeric, "conditional sample lost its evidence prefix");
        }
        graphs.push_back(std::move(g));
    }
    if (out_path.empty() || out_path == "-") {
        emit_samples(std::cout, graphs, smiles, model.atoms);
    } else {
        std::ofstream out = open_output(out_path);
        emit_samples(out, graphs, smiles, model.atoms);
    }
    std::cerr << "sampled " << count << " graphs (collisions=" << stats.collisions << ", retries=" << stats.retries
              << ", fallbacks=" << stats.fallbacks << ")\n";
    return 0;
}

int cmd_metrics(const std::string& samples_path, const std::string& train_path) {
    Dataset train = load_dataset(train_path);
    if (train.atoms.empty()) raise(ErrorKind::data, "metrics need a molecule training dataset (atoms header)");
    const AtomVocabulary vocab = AtomVocabulary::from_symbols(train.atoms);
    std::vector<SparseGraph> samples = load_samples(samples_path, train.atoms);
    MetricsReport r = compute_metrics(samples, train.graphs, vocab);
    json out;
    out["total"] = r.total;
    out["valid"] = r.valid;
    out["unique"] = r.unique_count;
    out["novel"] = r.novel_count;
    out["validity"] = r.validity ? json(*r.validity) : json(nullptr);
    out["uniqueness"] = r.uniqueness ? json(*r.uniqueness) : json(nullptr);
    out["novelty"] = r.novelty ? json(*r.novelty) : json(nullptr);
    out["valence_failures"] = r.valence_failures;
    out["disconnected_failures"] = r.disconnected_failures;
    out["unknown_type_failures"] = r.unknown_type_failures;
    std::cout << out.dump() << '\n';
    return 0;
}

int cmd_grid(const std::string& data_path, const std::string& grid_path, const json& overrides) {
    Dataset ds = load_dataset(data_path);
    const json spec = load_json_file(grid_path);
    json cfg = spec.contains("base") ? spec["base"] : json::object();
    for (auto it = overrides.begin(); it != overrides.end(); ++it) cfg["train"][it.key()] = it.value();
    OptimizerConfig base = optimizer_from_json(cfg);
    const json axes = spec.contains("axes") ? spec["axes"] : json::object();
    auto axis = [&](const char* name, std::vector<std::uint32_t> fallback) {
        if (!axes.contains(name)) return fallback;
        return axes[name].get<std::vector<std::uint32_t>>();
    };
    const std::vector<std::string> kinds =
        axes.contains("kind") ? axes["kind"].get<std::vector<std::string>>() : std::vector<std::string>{"BT"};
    const auto nl_node = axis("n_L_node", {2});
    const auto nl_eidx = axis("n_L_edge_idx", {2});
    const auto nl_etype = axis("n_L_edge_type", {1});
    const auto n_s = axis("n_S", {8});
    const auto n_i = axis("n_I", {8});
    const auto n_r = axis("n_R", {1});
    const auto n_c = axis("n_c", {16});
    const std::uint64_t model_seed = spec.contains("seed") ? spec["seed"].get<std::uint64_t>() : 1;
    std::vector<GridEntry> grid;
    for (const std::string& kind : kinds)
        for (auto a : nl_node)
            for (auto b : nl_eidx)
                for (auto c : nl_etype)
                    for (auto s : n_s)
                        for (auto i : n_i)
                            for (auto r : n_r)
                                for (auto m : n_c) {
                                    ModelConfig mc;
                                    mc.kind = kind == "RT" ? RegionGraphSpec::Kind::RT : RegionGraphSpec::Kind::BT;
                                    mc.node_type = {a, s, i};
                                    mc.edge_index = {b, s, i};
                                    mc.edge_type = {c, s, i};
                                    mc.n_R = r;
                                    mc.n_c = m;
                                    mc.seed = model_seed;
                                    std::ostringstream name;
                                    name << kind << "_nLn" << a << "_nLe" << b << "_nLt" << c << "_nS" << s << "_nI"
                                         << i << "_nR" << r << "_nc" << m;
                                    grid.push_back({name.str(), mc});
                                }
    const std::size_t sample_count = spec.contains("sample_count") ? spec["sample_count"].get<std::size_t>() : 1000;
    auto results = grid_search(ds.schema, ds.graphs, ds.atoms, grid, base, sample_count);
    std::cout << "rank,name,val_nll,validity,failed,error\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const GridResult& r = results[i];
        std::cout << i + 1 << ',' << r.name << ',' << fmt_double(r.val_nll) << ','
                  << (r.validity ? fmt_double(*r.validity) : "") << ',' << (r.failed ? "yes" : "no") << ','
                  << (r.failed ? "\"" + r.error + "\"" : "") << '\n';
    }
    return 0;
}

int cmd_bench(const std::string& out_path, std::uint32_t batch, std::uint32_t reps, std::uint64_t seed,
              std::uint64_t mem_cap_mb, const std::string& schemas_path, const BenchCircuitConfig& knobs) {
    BenchConfig cfg;
    cfg.schemas = reference_bench_schemas();
    if (!schemas_path.empty()) {
        cfg.schemas.clear();
        for (const json& row : load_json_file(schemas_path)) {
            cfg.schemas.push_back({row.at("name").get<std::string>(),
                                   {row.at("n_max").get<std::uint32_t>(), row.at("m_max").get<std::uint32_t>(),
                                    row.at("n_V").get<std::uint32_t>(), row.at("n_E").get<std::uint32_t>()}});
        }
    }
    cfg.batch_size = batch;
    cfg.repetitions = reps;
    cfg.seed = seed;
    cfg.mem_cap_bytes = mem_cap_mb << 20;
    cfg.circuit = knobs;
    auto rows = run_bench(cfg);
    if (out_path.empty() || out_path == "-") {
        write_bench_csv(std::cout, rows);
    } else {
        std::ofstream out = open_output(out_path);
        write_bench_csv(out, rows);
    }
    return 0;
}

int cmd_grad_check(const std::string& model_path, const std::string& data_path, std::uint64_t toy_seed, double step,
                   double tol, std::size_t max_params, std::uint64_t seed) {
    SpgcModel model = [&] {
        if (!model_path.empty()) return load_model_file(model_path);
        // self-contained toy model: small schema, random parameters
        ModelConfig mc;
        mc.n_c = 4;
        mc.seed = toy_seed;
        mc.node_type = {2, 2, 2};
        mc.edge_index = {2, 2, 2};
        mc.edge_type = {1, 2, 2};
        SpgcModel m = build_spgc_model({3, 2, 2, 2}, mc);
        randomize_params(m.circuit, toy_seed, 0.5);
        for (double& v : m.cardinality.log_probs) v = 0.0; // unnormalized is fine: only the circuit is differenced
        return m;
    }();
    SparseGraph g;
    if (!data_path.empty()) {
        Dataset ds = load_dataset(data_path);
        if (ds.graphs.empty()) raise(ErrorKind::data, "dataset has no graphs");
        g = ds.graphs.front();
    } else {
        g = SparseGraph{{0, 1, 1}, {{1, 0, 1}, {2, 0, 0}}};
    }
    GradCheckReport r = grad_check(model, g, step, tol, max_params, seed);
    json out;
    out["max_rel_err"] = json_number(r.max_rel_err);
    out["checked"] = r.checked;
    out["passed"] = r.passed;
    std::cout << out.dump() << '\n';
    return r.passed ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse probabilistic graph circuits"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "SMILES file -> JSONL dataset with inferred schema");
    std::string in_path, out_path;
    ingest->add_option("--input", in_path, "SMILES input file")->required();
    ingest->add_option("--output", out_path, "JSONL output path ('-' for stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "dataset statistics table (CSV)");
    std::vector<std::string> stats_inputs;
    stats->add_option("--input", stats_inputs, "SMILES or JSONL dataset files")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "maximum-likelihood training");
    std::string train_data, train_cfg, model_out, log_out;
    std::optional<double> o_lr, o_smooth;
    std::optional<std::uint32_t> o_epochs, o_batch, o_threads;
    std::optional<std::uint64_t> o_seed;
    train_cmd->add_option("--data", train_data, "JSONL dataset")->required();
    train_cmd->add_option("--config", train_cfg, "JSON config file");
    train_cmd->add_option("--model-out", model_out, "model output path");
    train_cmd->add_option("--log-out", log_out, "per-epoch CSV log path");
    train_cmd->add_option("--epochs", o_epochs, "override train.epochs");
    train_cmd->add_option("--lr", o_lr, "override train.learning_rate");
    train_cmd->add_option("--batch-size", o_batch, "override train.batch_size");
    train_cmd->add_option("--threads", o_threads, "override train.threads");
    train_cmd->add_option("--smoothing", o_smooth, "override train.smoothing");
    train_cmd->add_option("--seed", o_seed, "override train.seed");

    // eval-nll
    auto* eval_cmd = app.add_subcommand("eval-nll", "mean negative log-likelihood of a dataset");
    std::string eval_model, eval_data;
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--data", eval_data, "JSONL dataset")->required();

    // sample / cond-sample
    std::string sample_model, sample_out, cond_sub;
    std::uint64_t sample_count = 10000, sample_seed = 0;
    std::uint32_t sample_retries = 100;
    bool sample_smiles = false;
    auto* sample_cmd = app.add_subcommand("sample", "unconditional graph generation");
    sample_cmd->add_option("--model", sample_model, "model file")->required();
    sample_cmd->add_option("--count", sample_count, "number of samples");
    sample_cmd->add_option("--seed", sample_seed, "sampling seed");
    sample_cmd->add_option("--max-retries", sample_retries, "collision retry cap");
    sample_cmd->add_option("--out", sample_out, "output path ('-' for stdout)");
    sample_cmd->add_flag("--smiles", sample_smiles, "emit SMILES lines instead of JSONL");

    auto* cond_cmd = app.add_subcommand("cond-sample", "substructure-conditioned generation");
    cond_cmd->add_option("--model", sample_model, "model file")->required();
    cond_cmd->add_option("--substructure", cond_sub, "SMILES substructure to condition on")->required();
    cond_cmd->add_option("--count", sample_count, "number of samples");
    cond_cmd->add_option("--seed", sample_seed, "sampling seed");
    cond_cmd->add_option("--max-retries", sample_retries, "collision retry cap");
    cond_cmd->add_option("--out", sample_out, "output path ('-' for stdout)");
    cond_cmd->add_flag("--smiles", sample_smiles, "emit SMILES lines instead of JSONL");

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "validity/uniqueness/novelty of samples");
    std::string metrics_samples, metrics_train;
    metrics_cmd->add_option("--samples", metrics_samples, "sample file (JSONL or SMILES)")->required();
    metrics_cmd->add_option("--train", metrics_train, "training JSONL dataset")->required();

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "hyperparameter grid search");
    std::string grid_data, grid_spec;
    grid_cmd->add_option("--data", grid_data, "JSONL dataset")->required();
    grid_cmd->add_option("--grid", grid_spec, "grid JSON file")->required();
    grid_cmd->add_option("--epochs", o_epochs, "override train.epochs");
    grid_cmd->add_option("--seed", o_seed, "override train.seed");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "sparse vs dense scaling benchmark");
    std::string bench_out, bench_schemas;
    std::uint32_t bench_batch = 256, bench_reps = 5;
    std::uint64_t bench_seed = 0, bench_cap_mb = 2048;
    BenchCircuitConfig knobs;
    bench_cmd->add_option("--out", bench_out, "CSV output path ('-' for stdout)");
    bench_cmd->add_option("--schemas", bench_schemas, "JSON schema list (default: reference datasets)");
    bench_cmd->add_option("--batch", bench_batch, "batch size");
    bench_cmd->add_option("--reps", bench_reps, "timing repetitions (median)");
    bench_cmd->add_option("--seed", bench_seed, "seed");
    bench_cmd->add_option("--mem-cap-mb", bench_cap_mb, "skip sides above this activation footprint");
    bench_cmd->add_option("--n-L-node", knobs.n_L_node, "node-group layers");
    bench_cmd->add_option("--n-L-edge", knobs.n_L_edge, "edge-group layers");
    bench_cmd->add_option("--n-S", knobs.n_S, "children per sum");
    bench_cmd->add_option("--n-I", knobs.n_I, "input units per variable");
    bench_cmd->add_option("--n-c", knobs.n_c, "top-level sum children");

    // grad-check
    auto* gc_cmd = app.add_subcommand("grad-check", "backward vs central finite differences");
    std::string gc_model, gc_data;
    std::uint64_t gc_toy_seed = 7, gc_seed = 0;
    double gc_step = 1e-5, gc_tol = 1e-4;
    std::size_t gc_max_params = 200;
    gc_cmd->add_option("--model", gc_model, "model file (default: built-in toy model)");
    gc_cmd->add_option("--data", gc_data, "JSONL dataset for the probe graph");
    gc_cmd->add_option("--toy-seed", gc_toy_seed, "seed for the built-in toy model");
    gc_cmd->add_option("--step", gc_step, "finite-difference step");
    gc_cmd->add_option("--tol", gc_tol, "max relative error tolerance");
    gc_cmd->add_option("--max-params", gc_max_params, "parameter subset size");
    gc_cmd->add_option("--seed", gc_seed, "subset selection seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        json overrides = json::object();
        if (o_epochs) overrides["epochs"] = *o_epochs;
        if (o_lr) overrides["learning_rate"] = *o_lr;
        if (o_batch) overrides["batch_size"] = *o_batch;
        if (o_threads) overrides["threads"] = *o_threads;
        if (o_smooth) overrides["smoothing"] = *o_smooth;
        if (o_seed) overrides["seed"] = *o_seed;

        if (app.got_subcommand(ingest)) return cmd_ingest(in_path, out_path);
        if (app.got_subcommand(stats)) return cmd_stats(stats_inputs);
        if (app.got_subcommand(train_cmd)) return cmd_train(train_data, train_cfg, model_out, log_out, overrides);
        if (app.got_subcommand(eval_cmd)) return cmd_eval_nll(eval_model, eval_data);
        if (app.got_subcommand(sample_cmd))
            return cmd_sample(sample_model, sample_count, sample_seed, sample_smiles, sample_retries, sample_out, "");
        if (app.got_subcommand(cond_cmd))
            return cmd_sample(sample_model, sample_count, sample_seed, sample_smiles, sample_retries, sample_out,
                              cond_sub);
        if (app.got_subcommand(metrics_cmd)) return cmd_metrics(metrics_samples, metrics_train);
        if (app.got_subcommand(grid_cmd)) return cmd_grid(grid_data, grid_spec, overrides);
        if (app.got_subcommand(bench_cmd))
            return cmd_bench(bench_out, bench_batch, bench_reps, bench_seed, bench_cap_mb, bench_schemas, knobs);
        if (app.got_subcommand(gc_cmd))
            return cmd_grad_check(gc_model, gc_data, gc_toy_seed, gc_step, gc_tol, gc_max_params, gc_seed);
        std::cerr << "usage error: no subcommand\n";
        return 1;
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::numeric:
            std::cerr << "numeric error: " << e.what() << '\n';
            return 3;
        default:
            std::cerr << "data error: " << e.what() << '\n';
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    }
}
