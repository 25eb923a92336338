#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadif/diffusion.hpp"
#include "adadif/errors.hpp"
#include "adadif/graph.hpp"
#include "adadif/labels.hpp"
#include "adadif/optim.hpp"
#include "adadif/walks.hpp"

namespace adadif {

/// Leave-one-out landing-probability matrix for one class, |L| x K over the
/// labeled rows in node order: a row belonging to a class-c seed i holds the
/// walk seeded at the other class seeds, evaluated at i; every other row
/// holds the full-seed walk.
inline Eigen::MatrixXd build_loo_matrix(const Graph& g, const LabeledSet& ls, ClassId c,
                                        int K) {
    const std::vector<NodeId> members = ls.members(c);
    if (members.size() < 2)
        throw data_error("class " + std::to_string(c) +
                         " needs at least two labeled nodes for leave-one-out walks");
    const std::vector<Eigen::MatrixXd> loo = leave_one_out_walks(g, members, K, ls.nodes);
    const LandingProbabilities full = landing_probabilities(g, make_seed(members), K);

    Eigen::MatrixXd R(static_cast<Eigen::Index>(ls.size()), K);
    for (std::size_t p = 0; p < ls.size(); ++p) {
        const NodeId i = ls.nodes[p];
        const auto it = std::lower_bound(members.begin(), members.end(), i);
        if (it != members.end() && *it == i) {
            R.row(static_cast<Eigen::Index>(p)) =
                loo[static_cast<std::size_t>(it - members.begin())]
                    .row(static_cast<Eigen::Index>(p));
        } else {
            R.row(static_cast<Eigen::Index>(p)) = full.steps.row(i);
        }
    }
    return R;
}

/// Degree-weighted data-fit term of the robust objective for one class:
/// || Dl^{-1/2} (o + ybar_c - R theta) ||^2 over the labeled rows.
inline double robust_loss(const Graph& g, const LabeledSet& ls, const Eigen::MatrixXd& R,
                          ClassId c, const Eigen::VectorXd& o, const Eigen::VectorXd& theta) {
    const auto L = static_cast<Eigen::Index>(ls.size());
    if (R.rows() != L || o.size() != L || R.cols() != theta.size())
        throw data_error("robust loss dimensions disagree");
    const double inv_l = 1.0 / static_cast<double>(ls.size());
    const Eigen::VectorXd fit = R * theta;
    double acc = 0.0;
    for (Eigen::Index p = 0; p < L; ++p) {
        const double ybar = ls.has_label(static_cast<std::size_t>(p), c) ? inv_l : 0.0;
        const double r = o[p] + ybar - fit[p];
        acc += r * r / g.degrees[ls.nodes[static_cast<std::size_t>(p)]];
    }
    return acc;
}

/// Convention for the outlier update inside the alternating fit.
/// `corrective` is the exact block minimizer of the joint objective: a
/// degree-weighted threshold that cancels the shrunk residual. `residual`
/// thresholds the raw residual matrix directly, unweighted and with the
/// residual's own sign.
enum class OutlierStep { residual, corrective };

inline const char* to_string(OutlierStep s) {
    return s == OutlierStep::residual ? "residual" : "corrective";
}

struct RobustParams {
    int K = 50;
    double lambda_theta = 67.5e-5;
    double lambda_o = 14.6e-3;
    double tol = 1e-4;   ///< sup-norm change of any class's coefficients
    int max_sweeps = 100;
    OutlierStep step = OutlierStep::residual;
    SimplexQpOptions qp;
};

/// Per-sample precomputation for the alternating fit. Building it costs the
/// leave-one-out walks; reusing it lets a threshold sweep rerun the cheap
/// alternation many times.
struct RobustWork {
    std::vector<ClassId> class_ids;
    std::vector<Eigen::MatrixXd> R;    ///< per class, |L| x K
    std::vector<Eigen::MatrixXd> G;    ///< per class, K x |L|: R^T Dl
    std::vector<Eigen::MatrixXd> A0;   ///< per class, K x K: R^T Dl R
    std::vector<Eigen::VectorXd> ybar; ///< per class, |L|
    Eigen::VectorXd inv_deg;           ///< 1/d_i over labeled rows
    std::vector<NodeId> nodes;         ///< labeled nodes, ascending
};

inline RobustWork prepare_robust(const Graph& g, const LabeledSet& ls, int K) {
    RobustWork w;
    w.class_ids = ls.active_classes();
    w.nodes = ls.nodes;
    const auto L = static_cast<Eigen::Index>(ls.size());
    w.inv_deg.resize(L);
    for (Eigen::Index p = 0; p < L; ++p)
        w.inv_deg[p] = 1.0 / g.degrees[ls.nodes[static_cast<std::size_t>(p)]];

    const double inv_l = 1.0 / static_cast<double>(ls.size());
    for (ClassId c : w.class_ids) {
        Eigen::MatrixXd R = build_loo_matrix(g, ls, c, K);
        Eigen::MatrixXd G = R.transpose() * w.inv_deg.asDiagonal();
        w.A0.push_back(G * R);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(L);
        for (Eigen::Index p = 0; p < L; ++p)
            if (ls.has_label(static_cast<std::size_t>(p), c)) y[p] = inv_l;
        w.ybar.push_back(std::move(y));
        w.G.push_back(std::move(G));
        w.R.push_back(std::move(R));
    }
    return w;
}

/// Outcome of the alternating minimization, before outlier removal.
struct AlternationResult {
    std::vector<Eigen::VectorXd> theta; ///< per class
    Eigen::MatrixXd outliers;           ///< |L| x classes
    Eigen::MatrixXd residuals;          ///< ybar - R theta, final sweep
    std::vector<double> objective_trace;
    int sweeps = 0;
    bool monotone = true;
};

namespace detail {

inline double robust_objective(const RobustWork& w, const RobustParams& rp,
                               const std::vector<Eigen::VectorXd>& theta,
                               const Eigen::MatrixXd& O, const Eigen::MatrixXd& resid) {
    double obj = 0.0;
    const auto L = w.inv_deg.size();
    for (std::size_t c = 0; c < w.class_ids.size(); ++c) {
        for (Eigen::Index p = 0; p < L; ++p) {
            const double r = O(p, static_cast<Eigen::Index>(c)) +
                             resid(p, static_cast<Eigen::Index>(c));
            obj += w.inv_deg[p] * r * r;
        }
        obj += rp.lambda_theta * theta[c].squaredNorm();
    }
    for (Eigen::Index p = 0; p < L; ++p)
        obj += rp.lambda_o * O.row(p).norm() * std::sqrt(w.inv_deg[p]);
    return obj;
}

} // namespace detail

/// Alternates per-class coefficient solves with the outlier update until no
/// class's coefficients move by more than tol (sup-norm), or the sweep
/// budget runs out. Records the joint objective after every sweep.
inline AlternationResult run_alternation(const RobustWork& w, const RobustParams& rp) {
    const auto L = w.inv_deg.size();
    const auto C = static_cast<Eigen::Index>(w.class_ids.size());
    const int K = rp.K;

    AlternationResult res;
    res.outliers = Eigen::MatrixXd::Zero(L, C);
    res.residuals = Eigen::MatrixXd::Zero(L, C);
    res.theta.assign(w.class_ids.size(),
                     Eigen::VectorXd::Constant(K, 1.0 / static_cast<double>(K)));

    for (int sweep = 1; sweep <= rp.max_sweeps; ++sweep) {
        double delta = 0.0;
        for (Eigen::Index c = 0; c < C; ++c) {
            QuadraticSystem sys;
            sys.A = w.A0[c];
            sys.A.diagonal().array() += rp.lambda_theta;
            sys.b = -2.0 * (w.G[c] * (w.ybar[c] + res.outliers.col(c)));
            const Eigen::VectorXd prev = res.theta[c];
            res.theta[c] = solve_simplex_qp(sys, rp.qp, &prev).theta;
            delta = std::max(delta, (res.theta[c] - prev).cwiseAbs().maxCoeff());
            res.residuals.col(c) = w.ybar[c] - w.R[c] * res.theta[c];
        }

        if (rp.step == OutlierStep::residual) {
            res.outliers = row_group_soft_threshold(res.residuals, rp.lambda_o);
        } else {
            for (Eigen::Index p = 0; p < L; ++p) {
                const double norm = res.residuals.row(p).norm();
                const double thr = 0.5 * rp.lambda_o / std::sqrt(w.inv_deg[p]);
                const double factor = norm > thr ? 1.0 - thr / norm : 0.0;
                res.outliers.row(p) = -factor * res.residuals.row(p);
            }
        }

        const double obj = detail::robust_objective(w, rp, res.theta, res.outliers,
                                                    res.residuals);
        if (!res.objective_trace.empty() && obj > res.objective_trace.back() + 1e-9)
            res.monotone = false;
        res.objective_trace.push_back(obj);
        res.sweeps = sweep;
        if (sweep >= 2 && delta <= rp.tol) break;
    }
    return res;
}

/// Full robust fit: the alternation plus outlier extraction, seed cleaning,
/// and a rediffusion from the cleaned seeds with the learned coefficients.
struct RobustFit {
    std::vector<ClassDiffusion> diffusions; ///< from cleaned seeds
    std::vector<ClassId> class_ids;
    std::vector<Eigen::VectorXd> theta;
    Eigen::MatrixXd outliers;
    std::vector<NodeId> flagged;            ///< nodes with a nonzero outlier row
    std::vector<std::vector<NodeId>> cleaned_members;
    std::vector<ClassId> retained_seed_classes; ///< removal refused to keep one seed
    std::vector<double> objective_trace;
    int sweeps = 0;
    bool monotone = true;
};

inline RobustFit fit_radadif(const Graph& g, const LabeledSet& ls, const RobustParams& rp) {
    const RobustWork w = prepare_robust(g, ls, rp.K);
    AlternationResult alt = run_alternation(w, rp);

    RobustFit fit;
    fit.class_ids = w.class_ids;
    fit.theta = std::move(alt.theta);
    fit.outliers = std::move(alt.outliers);
    fit.objective_trace = std::move(alt.objective_trace);
    fit.sweeps = alt.sweeps;
    fit.monotone = alt.monotone;

    const auto L = static_cast<Eigen::Index>(ls.size());
    std::vector<char> is_flagged(ls.size(), 0);
    for (Eigen::Index p = 0; p < L; ++p)
        if (fit.outliers.row(p).norm() > 0.0) {
            is_flagged[static_cast<std::size_t>(p)] = 1;
            fit.flagged.push_back(ls.nodes[static_cast<std::size_t>(p)]);
        }

    const NodeId n = g.order();
    Eigen::VectorXd cur(n), next(n), scratch(n);
    for (std::size_t c = 0; c < w.class_ids.size(); ++c) {
        const std::vector<NodeId> members = ls.members(w.class_ids[c]);
        std::vector<NodeId> cleaned;
        for (NodeId i : members) {
            const auto p = static_cast<std::size_t>(
                std::lower_bound(ls.nodes.begin(), ls.nodes.end(), i) - ls.nodes.begin());
            if (!is_flagged[p]) cleaned.push_back(i);
        }
        if (cleaned.empty()) {
            // Never remove every seed of a class: keep the least anomalous one.
            double best = std::numeric_limits<double>::infinity();
            NodeId keep = members.front();
            for (NodeId i : members) {
                const auto p = static_cast<Eigen::Index>(
                    std::lower_bound(ls.nodes.begin(), ls.nodes.end(), i) - ls.nodes.begin());
                const double r = alt.residuals.row(p).norm();
                if (r < best) {
                    best = r;
                    keep = i;
                }
            }
            cleaned.push_back(keep);
            fit.retained_seed_classes.push_back(w.class_ids[c]);
        }

        cur = make_seed(cleaned).dense(n);
        Eigen::VectorXd scores = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < rp.K; ++k) {
            apply_transition(g, cur.data(), next.data(), scratch.data());
            cur.swap(next);
            scores.noalias() += fit.theta[c][k] * cur;
        }
        fit.diffusions.push_back({w.class_ids[c], std::move(scores), fit.theta[c]});
        fit.cleaned_members.push_back(std::move(cleaned));
    }
    return fit;
}

/// Detection rates of a flagged set against ground-truth outliers, over the
/// labeled nodes. Empty denominators yield zero.
struct DetectionCounts {
    double p_detect = 0.0;
    double p_false = 0.0;
    std::int64_t hits = 0;
    std::int64_t false_alarms = 0;
    std::int64_t true_outliers = 0;
    std::int64_t clean_nodes = 0;
};

inline DetectionCounts detection_counts(const std::vector<NodeId>& flagged,
                                        const std::vector<NodeId>& truth,
                                        const std::vector<NodeId>& labeled) {
    const auto is_in = [](const std::vector<NodeId>& sorted, NodeId x) {
        return std::binary_search(sorted.begin(), sorted.end(), x);
    };
    std::vector<NodeId> f = flagged, t = truth, l = labeled;
    std::sort(f.begin(), f.end());
    std::sort(t.begin(), t.end());
    std::sort(l.begin(), l.end());

    DetectionCounts d;
    d.true_outliers = static_cast<std::int64_t>(t.size());
    for (NodeId x : f) {
        if (is_in(t, x)) ++d.hits;
        else ++d.false_alarms;
    }
    for (NodeId x : l)
        if (!is_in(t, x)) ++d.clean_nodes;
    d.p_detect = d.true_outliers > 0
                     ? static_cast<double>(d.hits) / static_cast<double>(d.true_outliers)
                     : 0.0;
    d.p_false = d.clean_nodes > 0
                    ? static_cast<double>(d.false_alarms) / static_cast<double>(d.clean_nodes)
                    : 0.0;
    return d;
}

} // namespace adadif
