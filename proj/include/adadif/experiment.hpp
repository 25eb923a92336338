#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "adadif/dataset.hpp"
#include "adadif/diffusion.hpp"
#include "adadif/errors.hpp"
#include "adadif/metrics.hpp"
#include "adadif/random.hpp"
#include "adadif/robust.hpp"
#include "adadif/sampling.hpp"

namespace adadif {

enum class MethodKind { adadif, radadif, ppr, hk, lp, kstep };

inline const char* to_string(MethodKind k) {
    switch (k) {
        case MethodKind::adadif: return "adadif";
        case MethodKind::radadif: return "radadif";
        case MethodKind::ppr: return "ppr";
        case MethodKind::hk: return "hk";
        case MethodKind::lp: return "lp";
        case MethodKind::kstep: return "kstep";
    }
    return "?";
}

inline MethodKind method_from_string(const std::string& s) {
    if (s == "adadif") return MethodKind::adadif;
    if (s == "radadif") return MethodKind::radadif;
    if (s == "ppr") return MethodKind::ppr;
    if (s == "hk") return MethodKind::hk;
    if (s == "lp") return MethodKind::lp;
    if (s == "kstep") return MethodKind::kstep;
    throw data_error("unknown method: " + s);
}

/// Everything needed to fit one classifier.
struct MethodSpec {
    MethodKind kind = MethodKind::adadif;
    HyperParams hyper;          ///< adadif
    RobustParams robust;        ///< radadif
    double alpha = 0.98;        ///< ppr restart weight
    double t = 5.0;             ///< hk temperature
    int steps = 50;             ///< walk length (ppr/hk), iterations (lp), step index (kstep)
};

inline std::vector<ClassDiffusion> fit_method(const Graph& g, const LabeledSet& ls,
                                              const MethodSpec& m) {
    switch (m.kind) {
        case MethodKind::adadif: return fit_adadif(g, ls, m.hyper);
        case MethodKind::radadif: return fit_radadif(g, ls, m.robust).diffusions;
        case MethodKind::ppr: return fit_fixed(g, ls, ppr_coefficients(m.alpha, m.steps));
        case MethodKind::hk: return fit_fixed(g, ls, hk_coefficients(m.t, m.steps));
        case MethodKind::lp: return label_propagation(g, ls, m.steps);
        case MethodKind::kstep: return kstep_classifier(g, ls, m.steps);
    }
    throw data_error("unknown method kind");
}

/// Mixing matrix of D = 10 diffusion atoms over K steps: five heat-kernel
/// columns (t = 5, 8, 12, 15, 20) and five polynomial columns with
/// c_k proportional to k^beta (beta = 2, 4, 6, 8, 10), each on the simplex.
inline Eigen::MatrixXd default_dictionary(int K) {
    if (K < 1) throw data_error("K must be at least 1");
    const double hk_t[] = {5.0, 8.0, 12.0, 15.0, 20.0};
    const double poly_beta[] = {2.0, 4.0, 6.0, 8.0, 10.0};
    Eigen::MatrixXd C(K, 10);
    for (int d = 0; d < 5; ++d) C.col(d) = hk_coefficients(hk_t[d], K);
    for (int d = 0; d < 5; ++d) {
        Eigen::VectorXd col(K);
        for (int k = 1; k <= K; ++k)
            col[k - 1] = std::pow(static_cast<double>(k), poly_beta[d]);
        C.col(5 + d) = col / col.sum();
    }
    return C;
}

/// How each trial samples its labeled nodes. Exactly one of per_class and
/// fraction must be set; p_cor > 0 additionally corrupts the sampled labels.
struct SamplingSpec {
    int per_class = 0;
    double fraction = 0.0;
    double p_cor = 0.0;
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double micro = 0.0;
    double macro = 0.0;
    double seconds = 0.0;
    std::int64_t zero_score_nodes = 0; ///< evaluated nodes no diffusion reached
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0; ///< sample standard deviation (n-1); zero for one trial
};

struct ExperimentResult {
    Aggregate micro;
    Aggregate macro;
    std::vector<TrialResult> trials;
};

namespace detail {

inline void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const int workers = std::min(jobs, n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w)
        threads.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> hold(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    double sum = 0.0;
    for (double x : xs) sum += x;
    a.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - a.mean) * (x - a.mean);
        a.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return a;
}

inline LabeledSet draw_sample(const Dataset& ds, const SamplingSpec& s,
                              std::uint64_t trial_seed, std::vector<NodeId>* flipped) {
    if ((s.per_class > 0) == (s.fraction > 0.0))
        throw data_error("exactly one of per-class and fraction sampling must be set");
    LabeledSet ls = s.per_class > 0
                        ? class_balanced_sample(ds, s.per_class, derive_seed(trial_seed, 1))
                        : uniform_sample(ds, s.fraction, derive_seed(trial_seed, 1));
    if (s.p_cor > 0.0) {
        CorruptedSample cs = corrupt_labels(ds, ls, s.p_cor, derive_seed(trial_seed, 2));
        if (flipped) *flipped = std::move(cs.flipped);
        return std::move(cs.sample);
    }
    if (flipped) flipped->clear();
    return ls;
}

} // namespace detail

/// Runs seeded Monte Carlo trials of one method under one sampling scheme.
/// Each trial draws its own labeled sample, fits on it, and scores
/// predictions on the held-out labeled nodes only. Trials are independent
/// and deterministic in (master_seed, trial index); `jobs` caps the number
/// of worker threads without affecting results.
inline ExperimentResult run_experiment(const Dataset& ds, const MethodSpec& method,
                                       const SamplingSpec& sampling, int trials,
                                       std::uint64_t master_seed, int jobs = 1) {
    if (trials < 1) throw data_error("trial count must be at least 1");
    ExperimentResult out;
    out.trials.resize(trials);

    detail::parallel_for(trials, jobs, [&](int t) {
        const std::uint64_t trial_seed = derive_seed(master_seed, static_cast<std::uint64_t>(t));
        const auto t0 = std::chrono::steady_clock::now();

        const LabeledSet ls = detail::draw_sample(ds, sampling, trial_seed, nullptr);
        const std::vector<ClassDiffusion> diffusions = fit_method(ds.graph, ls, method);

        std::vector<NodeId> eval;
        for (NodeId i : ds.labeled_nodes())
            if (!std::binary_search(ls.nodes.begin(), ls.nodes.end(), i)) eval.push_back(i);
        if (eval.empty()) throw data_error("no labeled nodes left to evaluate");

        std::int64_t unreached = 0;
        for (NodeId i : eval) {
            bool any = false;
            for (const ClassDiffusion& d : diffusions) any = any || d.scores[i] != 0.0;
            if (!any) ++unreached;
        }

        F1Scores f1;
        if (ds.multilabel) {
            std::vector<std::vector<ClassId>> truth;
            std::vector<int> m;
            for (NodeId i : eval) {
                truth.push_back(ds.labels[i]);
                m.push_back(static_cast<int>(ds.labels[i].size()));
            }
            f1 = micro_macro_f1(predict_top(diffusions, eval, m), truth, ds.classes);
        } else {
            std::vector<ClassId> truth;
            for (NodeId i : eval) truth.push_back(ds.labels[i].front());
            f1 = micro_macro_f1(predict(diffusions, eval), truth, ds.classes);
        }

        const auto t1 = std::chrono::steady_clock::now();
        out.trials[t] = {t, trial_seed, f1.micro, f1.macro,
                         std::chrono::duration<double>(t1 - t0).count(), unreached};
    });

    std::vector<double> micros, macros;
    for (const TrialResult& t : out.trials) {
        micros.push_back(t.micro);
        macros.push_back(t.macro);
    }
    out.micro = detail::aggregate(micros);
    out.macro = detail::aggregate(macros);
    return out;
}

/// One point of a detection sweep: mean detection and false-alarm rates of
/// the flagged set at one threshold.
struct RocPoint {
    double lambda_o = 0.0;
    double p_detect = 0.0;
    double p_false = 0.0;
};

/// Sweeps the outlier threshold over a grid, reusing each trial's
/// leave-one-out walks across the whole grid. Sampling must corrupt
/// (p_cor > 0) for the ground-truth outlier set to be nonempty.
inline std::vector<RocPoint> roc_sweep(const Dataset& ds, const SamplingSpec& sampling,
                                       const std::vector<double>& lambda_grid,
                                       const RobustParams& base, int trials,
                                       std::uint64_t master_seed, int jobs = 1) {
    if (trials < 1) throw data_error("trial count must be at least 1");
    if (lambda_grid.empty()) throw data_error("threshold grid is empty");

    std::vector<std::vector<DetectionCounts>> per_trial(
        trials, std::vector<DetectionCounts>(lambda_grid.size()));
    detail::parallel_for(trials, jobs, [&](int t) {
        const std::uint64_t trial_seed = derive_seed(master_seed, static_cast<std::uint64_t>(t));
        std::vector<NodeId> flipped;
        const LabeledSet ls = detail::draw_sample(ds, sampling, trial_seed, &flipped);
        const RobustWork work = prepare_robust(ds.graph, ls, base.K);
        for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
            RobustParams rp = base;
            rp.lambda_o = lambda_grid[j];
            const AlternationResult alt = run_alternation(work, rp);
            std::vector<NodeId> flagged;
            for (Eigen::Index p = 0; p < alt.outliers.rows(); ++p)
                if (alt.outliers.row(p).norm() > 0.0)
                    flagged.push_back(ls.nodes[static_cast<std::size_t>(p)]);
            per_trial[t][j] = detection_counts(flagged, flipped, ls.nodes);
        }
    });

    std::vector<RocPoint> points(lambda_grid.size());
    for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
        points[j].lambda_o = lambda_grid[j];
        for (int t = 0; t < trials; ++t) {
            points[j].p_detect += per_trial[t][j].p_detect;
            points[j].p_false += per_trial[t][j].p_false;
        }
        points[j].p_detect /= static_cast<double>(trials);
        points[j].p_false /= static_cast<double>(trials);
    }
    return points;
}

// JSON views of the result types; every document carries schema_version 1.

inline nlohmann::json to_json(const Aggregate& a) {
    return {{"mean", a.mean}, {"stddev", a.stddev}};
}

inline nlohmann::json to_json(const TrialResult& t) {
    return {{"trial", t.trial},     {"seed", t.seed},
            {"micro_f1", t.micro},  {"macro_f1", t.macro},
            {"seconds", t.seconds}, {"zero_score_nodes", t.zero_score_nodes}};
}

inline nlohmann::json to_json(const ExperimentResult& r) {
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialResult& t : r.trials) trials.push_back(to_json(t));
    return {{"micro_f1", to_json(r.micro)}, {"macro_f1", to_json(r.macro)},
            {"trials", std::move(trials)}};
}

inline nlohmann::json to_json(const MethodSpec& m) {
    nlohmann::json j{{"name", to_string(m.kind)}};
    switch (m.kind) {
        case MethodKind::adadif:
            j["k"] = m.hyper.K;
            j["lambda"] = m.hyper.lambda;
            j["unconstrained"] = m.hyper.unconstrained;
            j["dictionary"] = m.hyper.dictionary.has_value();
            break;
        case MethodKind::radadif:
            j["k"] = m.robust.K;
            j["lambda_theta"] = m.robust.lambda_theta;
            j["lambda_o"] = m.robust.lambda_o;
            j["outlier_step"] = to_string(m.robust.step);
            break;
        case MethodKind::ppr:
            j["alpha"] = m.alpha;
            j["k"] = m.steps;
            break;
        case MethodKind::hk:
            j["t"] = m.t;
            j["k"] = m.steps;
            break;
        case MethodKind::lp:
            j["iterations"] = m.steps;
            break;
        case MethodKind::kstep:
            j["k"] = m.steps;
            break;
    }
    return j;
}

inline nlohmann::json to_json(const SamplingSpec& s) {
    nlohmann::json j;
    if (s.per_class > 0) j["per_class"] = s.per_class;
    if (s.fraction > 0.0) j["fraction"] = s.fraction;
    j["p_cor"] = s.p_cor;
    return j;
}

inline nlohmann::json to_json(const DatasetStats& s) {
    return {{"nodes", s.nodes},
            {"edges", s.edges},
            {"classes", s.classes},
            {"multilabel", s.multilabel}};
}

} // namespace adadif
