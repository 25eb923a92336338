// Command-line front end: fits diffusion classifiers over edge-list graphs
// and emits JSON. Subcommands: stats, run, corrupt, bound, roc.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adadif/adadif.hpp"

namespace {

using namespace adadif;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoOptions {
    std::string graph_path;
    std::string labels_path;
    std::string name;
    bool no_validate = false;
    std::string out_path;
};

struct SampleOptions {
    int per_class = 0;
    double fraction = 0.0;
    double p_cor = 0.0;
};

void add_io_options(CLI::App* cmd, IoOptions& io, bool with_out = true) {
    cmd->add_option("--graph", io.graph_path, "Edge-list file: \"u v\" or \"u v w\" per line")
        ->required();
    cmd->add_option("--labels", io.labels_path,
                    "Label file: \"node_id label_id\" per line")
        ->required();
    cmd->add_option("--name", io.name,
                    "Dataset name; known names are checked against published statistics");
    cmd->add_flag("--no-validate", io.no_validate, "Skip the known-name statistics check");
    if (with_out)
        cmd->add_option("--out", io.out_path, "Write the JSON document here instead of stdout");
}

void add_sample_options(CLI::App* cmd, SampleOptions& s, bool with_cor = true) {
    auto* per = cmd->add_option("--per-class", s.per_class,
                                "Labeled nodes sampled from every class");
    auto* frac = cmd->add_option("--fraction", s.fraction,
                                 "Fraction of labeled nodes sampled uniformly");
    per->excludes(frac);
    frac->excludes(per);
    if (with_cor)
        cmd->add_option("--p-cor", s.p_cor, "Probability of flipping each sampled label");
}

Dataset load(const IoOptions& io) {
    return load_dataset(io.graph_path, io.labels_path, io.name, !io.no_validate);
}

SamplingSpec sampling_spec(const SampleOptions& s) {
    if ((s.per_class > 0) == (s.fraction > 0.0))
        throw usage_error("pass exactly one of --per-class and --fraction");
    SamplingSpec spec;
    spec.per_class = s.per_class;
    spec.fraction = s.fraction;
    spec.p_cor = s.p_cor;
    return spec;
}

void emit(const nlohmann::json& doc, const IoOptions& io) {
    if (io.out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(io.out_path);
    if (!out) throw data_error("cannot open output file: " + io.out_path);
    out << doc.dump(2) << "\n";
}

nlohmann::json document(const char* command, const IoOptions& io, const Dataset& ds) {
    nlohmann::json doc{{"schema_version", 1},
                       {"command", command},
                       {"dataset", to_json(dataset_stats(ds))}};
    doc["dataset"]["labeled_nodes"] = ds.labeled_nodes().size();
    if (!io.name.empty()) doc["dataset"]["name"] = io.name;
    return doc;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw usage_error("--config " + key + " expects an integer, got \"" + value + "\"");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw usage_error("--config " + key + " expects a number, got \"" + value + "\"");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw usage_error("--config " + key + " expects true or false, got \"" + value + "\"");
}

/// Applies key=value pairs onto a method specification. One `k` knob sets
/// the walk length / iteration count of whichever method runs.
void apply_config(MethodSpec& m, const std::vector<std::string>& pairs) {
    bool want_dictionary = false;
    for (const std::string& kv : pairs) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw usage_error("--config expects key=value, got \"" + kv + "\"");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "k") {
            const int k = parse_int(key, value);
            m.hyper.K = k;
            m.robust.K = k;
            m.steps = k;
        } else if (key == "lambda") {
            m.hyper.lambda = parse_double(key, value);
        } else if (key == "unconstrained") {
            m.hyper.unconstrained = parse_bool(key, value);
        } else if (key == "ridge") {
            m.hyper.ridge = parse_double(key, value);
        } else if (key == "dictionary") {
            want_dictionary = parse_bool(key, value);
        } else if (key == "alpha") {
            m.alpha = parse_double(key, value);
        } else if (key == "t") {
            m.t = parse_double(key, value);
        } else if (key == "lambda_theta") {
            m.robust.lambda_theta = parse_double(key, value);
        } else if (key == "lambda_o") {
            m.robust.lambda_o = parse_double(key, value);
        } else if (key == "tol") {
            m.robust.tol = parse_double(key, value);
        } else if (key == "max_sweeps") {
            m.robust.max_sweeps = parse_int(key, value);
        } else if (key == "outlier_step") {
            if (value == "residual") m.robust.step = OutlierStep::residual;
            else if (value == "corrective") m.robust.step = OutlierStep::corrective;
            else
                throw usage_error("--config outlier_step expects residual or corrective, "
                                  "got \"" + value + "\"");
        } else if (key == "qp_tol") {
            m.hyper.qp.tol = parse_double(key, value);
            m.robust.qp.tol = m.hyper.qp.tol;
        } else if (key == "qp_max_iter") {
            m.hyper.qp.max_iter = parse_int(key, value);
            m.robust.qp.max_iter = m.hyper.qp.max_iter;
        } else {
            throw usage_error("unknown --config key \"" + key + "\"");
        }
    }
    if (want_dictionary) m.hyper.dictionary = default_dictionary(m.hyper.K);
}

std::vector<std::int64_t> original_ids(const Graph& g, const std::vector<NodeId>& nodes) {
    std::vector<std::int64_t> out;
    out.reserve(nodes.size());
    for (NodeId i : nodes) out.push_back(g.node_ids[i]);
    return out;
}

int run_stats(const IoOptions& io) {
    const Dataset ds = load(io);
    emit(document("stats", io, ds), io);
    return 0;
}

int run_run(const IoOptions& io, const SampleOptions& so, const std::string& method,
            const std::vector<std::string>& config, int trials, std::uint64_t seed,
            int jobs) {
    const Dataset ds = load(io);
    MethodSpec m;
    m.kind = method_from_string(method);
    apply_config(m, config);
    const SamplingSpec spec = sampling_spec(so);

    const ExperimentResult result = run_experiment(ds, m, spec, trials, seed, jobs);

    nlohmann::json doc = document("run", io, ds);
    doc["method"] = to_json(m);
    doc["sampling"] = to_json(spec);
    doc["trials"] = trials;
    doc["seed"] = seed;
    doc["result"] = to_json(result);
    emit(doc, io);
    return 0;
}

int run_corrupt(const IoOptions& io, const SampleOptions& so, std::uint64_t seed) {
    const Dataset ds = load(io);
    const SamplingSpec spec = sampling_spec(so);

    LabeledSet ls = spec.per_class > 0 ? class_balanced_sample(ds, spec.per_class, seed)
                                       : uniform_sample(ds, spec.fraction, seed);
    const CorruptedSample cs = corrupt_labels(ds, ls, spec.p_cor, derive_seed(seed, 1));

    nlohmann::json sample = nlohmann::json::array();
    for (std::size_t p = 0; p < cs.sample.size(); ++p)
        sample.push_back({{"node", ds.graph.node_ids[cs.sample.nodes[p]]},
                          {"label", cs.sample.labels[p].front()}});

    nlohmann::json doc = document("corrupt", io, ds);
    doc["sampling"] = to_json(spec);
    doc["seed"] = seed;
    std::vector<std::int64_t> flipped = original_ids(ds.graph, cs.flipped);
    std::sort(flipped.begin(), flipped.end());
    doc["sample"] = std::move(sample);
    doc["flipped"] = std::move(flipped);
    emit(doc, io);
    return 0;
}

int run_bound(const IoOptions& io, ClassId positive, double gamma, double alpha,
              bool empirical, int k_max) {
    const Dataset ds = load(io);
    std::vector<NodeId> pos, neg;
    for (NodeId i : ds.labeled_nodes()) {
        const auto& l = ds.labels[i];
        if (std::binary_search(l.begin(), l.end(), positive)) pos.push_back(i);
        else neg.push_back(i);
    }
    if (pos.empty())
        throw data_error("class " + std::to_string(positive) + " has no labeled nodes");
    if (neg.empty())
        throw data_error("every labeled node belongs to class " + std::to_string(positive));

    const SeedVector sp = make_seed(std::move(pos));
    const SeedVector sn = make_seed(std::move(neg));
    const SpectralSummary spectrum = spectral_summary(ds.graph);
    const BoundInputs in = make_bound_inputs(ds.graph, sp, sn, gamma, spectrum);

    nlohmann::json doc = document("bound", io, ds);
    doc["positive_class"] = positive;
    doc["gamma"] = gamma;
    doc["seeds"] = {{"positive", in.n_pos}, {"negative", in.n_neg}};
    doc["spectrum"] = {{"mu2", spectrum.mu2},
                       {"mu_max", spectrum.muN},
                       {"decay_rate", spectrum.mu_prime}};
    doc["k_bound"] = kgamma_bound(in);
    if (alpha > 0.0) doc["k_bound_restart"] = kgamma_bound_ppr(in, alpha);
    if (empirical) {
        const EmpiricalThreshold t = empirical_kgamma(ds.graph, sp, sn, gamma, k_max);
        doc["empirical"] = {{"found", t.found},
                            {"k", t.K},
                            {"norm_at_k", t.norm_at_K},
                            {"min_norm", t.min_norm}};
    }
    emit(doc, io);
    return 0;
}

int run_roc(const IoOptions& io, const SampleOptions& so, std::vector<double> grid,
            const std::vector<std::string>& config, int trials, std::uint64_t seed,
            int jobs) {
    const Dataset ds = load(io);
    MethodSpec m;
    m.kind = MethodKind::radadif;
    apply_config(m, config);
    const SamplingSpec spec = sampling_spec(so);
    if (!(spec.p_cor > 0.0))
        throw usage_error("--p-cor must be positive for a detection sweep");

    const auto points = roc_sweep(ds, spec, grid, m.robust, trials, seed, jobs);

    nlohmann::json arr = nlohmann::json::array();
    for (const RocPoint& p : points)
        arr.push_back({{"lambda_o", p.lambda_o},
                       {"p_detect", p.p_detect},
                       {"p_false", p.p_false}});

    nlohmann::json doc = document("roc", io, ds);
    doc["sampling"] = to_json(spec);
    doc["trials"] = trials;
    doc["seed"] = seed;
    doc["method"] = to_json(m);
    doc["points"] = std::move(arr);
    emit(doc, io);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph diffusion classifiers with adaptive per-class coefficients"};
    app.require_subcommand(1);

    IoOptions io;
    SampleOptions so;
    std::string method;
    std::vector<std::string> config;
    std::vector<double> grid;
    int trials = 20;
    std::uint64_t seed = 1;
    int jobs = 1;
    ClassId positive_class = 0;
    double gamma = 0.1;
    double alpha = 0.0;
    bool empirical = false;
    int k_max = 200;

    auto* stats = app.add_subcommand("stats", "Describe a dataset");
    add_io_options(stats, io);

    auto* run = app.add_subcommand("run", "Monte Carlo classification trials");
    add_io_options(run, io);
    add_sample_options(run, so);
    run->add_option("--method", method, "Classifier to fit")
        ->required()
        ->check(CLI::IsMember({"adadif", "radadif", "ppr", "hk", "lp", "kstep"}));
    run->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed; trial t derives its own seed from it");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--config", config, "Method knob as key=value (repeatable)");

    auto* corrupt = app.add_subcommand("corrupt", "Sample labels and flip some of them");
    add_io_options(corrupt, io);
    add_sample_options(corrupt, so);
    corrupt->add_option("--seed", seed, "Sampling seed");

    auto* bound = app.add_subcommand("bound", "Walk-length thresholds for one class");
    add_io_options(bound, io);
    bound->add_option("--positive-class", positive_class, "Class treated as positive")
        ->required();
    bound->add_option("--gamma", gamma, "Distinguishability target")->required();
    bound->add_option("--alpha", alpha, "Also bound restart-weighted coefficients");
    bound->add_flag("--empirical", empirical, "Also search for the empirical threshold");
    bound->add_option("--k-max", k_max, "Search horizon for --empirical")
        ->check(CLI::PositiveNumber);

    auto* roc = app.add_subcommand("roc", "Outlier-detection sweep over thresholds");
    add_io_options(roc, io);
    add_sample_options(roc, so);
    roc->add_option("--grid", grid, "Comma-separated outlier thresholds")
        ->required()
        ->delimiter(',');
    roc->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    roc->add_option("--seed", seed, "Master seed");
    roc->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    roc->add_option("--config", config, "Method knob as key=value (repeatable)");

    try {
        app.parse(argc, argv);
        if (stats->parsed()) return run_stats(io);
        if (run->parsed()) return run_run(io, so, method, config, trials, seed, jobs);
        if (corrupt->parsed()) return run_corrupt(io, so, seed);
        if (bound->parsed())
            return run_bound(io, positive_class, gamma, alpha, empirical, k_max);
        if (roc->parsed()) return run_roc(io, so, grid, config, trials, seed, jobs);
        throw usage_error("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
