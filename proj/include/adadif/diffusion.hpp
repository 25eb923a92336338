#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadif/errors.hpp"
#include "adadif/graph.hpp"
#include "adadif/labels.hpp"
#include "adadif/optim.hpp"
#include "adadif/walks.hpp"

namespace adadif {

/// Restart-weighted walk coefficients theta_k proportional to alpha^k,
/// k = 1..K, renormalized to the simplex (the k = 0 term is dropped).
inline Eigen::VectorXd ppr_coefficients(double alpha, int K) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw data_error("alpha must lie in (0, 1)");
    if (K < 1) throw data_error("K must be at least 1");
    Eigen::VectorXd theta(K);
    double term = 1.0;
    for (int k = 0; k < K; ++k) {
        term *= alpha;
        theta[k] = term;
    }
    return theta / theta.sum();
}

/// Heat-kernel coefficients theta_k proportional to t^k / k!, k = 1..K,
/// renormalized to the simplex.
inline Eigen::VectorXd hk_coefficients(double t, int K) {
    if (!(t > 0.0)) throw data_error("t must be positive");
    if (K < 1) throw data_error("K must be at least 1");
    Eigen::VectorXd theta(K);
    double term = 1.0;
    for (int k = 0; k < K; ++k) {
        term *= t / static_cast<double>(k + 1);
        theta[k] = term;
    }
    return theta / theta.sum();
}

/// Assembles the per-class quadratic objective over diffusion coefficients:
///   A = B^T Dl B + lambda B^T D^{-1} Bt,   b = -(2/|L|) B^T Dl y_c,
/// where B holds the diffusion basis (one column per step or dictionary
/// atom), Bt the basis differentials B - H B, Dl scales labeled rows by
/// 1/d_i (zero elsewhere), and y_c indicates class-c labeled nodes. A is
/// returned symmetrized, which preserves the quadratic form; the lambda
/// term equals the smoothness penalty since B^T D^{-1}(B - HB) =
/// B^T D^{-1} L D^{-1} B.
inline QuadraticSystem assemble_system(const Graph& g, const Eigen::MatrixXd& basis,
                                       const Eigen::MatrixXd& basis_diff,
                                       const LabeledSet& ls, ClassId c, double lambda) {
    const auto K = basis.cols();
    if (basis_diff.rows() != basis.rows() || basis_diff.cols() != K)
        throw data_error("basis and differential shapes disagree");
    if (lambda < 0.0) throw data_error("lambda must be nonnegative");
    const double inv_l = 1.0 / static_cast<double>(ls.size());

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
    for (std::size_t p = 0; p < ls.size(); ++p) {
        const NodeId i = ls.nodes[p];
        const double inv_d = 1.0 / g.degrees[i];
        A.noalias() += inv_d * basis.row(i).transpose() * basis.row(i);
        if (ls.has_label(p, c)) b.noalias() -= (2.0 * inv_l * inv_d) * basis.row(i).transpose();
    }
    if (lambda > 0.0) {
        Eigen::MatrixXd scaled = basis_diff.array().colwise() / g.degrees.array();
        A.noalias() += lambda * (basis.transpose() * scaled);
    }
    return {detail::symmetrized(A), std::move(b)};
}

/// Hyperparameters for the adaptive-diffusion fit.
struct HyperParams {
    int K = 15;
    double lambda = 15.0;
    bool unconstrained = false; ///< sum-to-one only, no sign constraint
    double ridge = -1.0;        ///< <0 picks 1e-8 * trace(A)/K automatically
    std::optional<Eigen::MatrixXd> dictionary; ///< K x D mixing matrix
    SimplexQpOptions qp;
};

namespace detail {

inline Eigen::VectorXd solve_coefficients(const QuadraticSystem& sys, const HyperParams& hp) {
    if (!hp.unconstrained) return solve_simplex_qp(sys, hp.qp).theta;
    const double ridge = hp.ridge >= 0.0
                             ? hp.ridge
                             : 1e-8 * sys.A.trace() / static_cast<double>(sys.A.rows());
    return solve_hyperplane_qp(sys, ridge);
}

} // namespace detail

/// Learns per-class diffusion coefficients and scores. For each class with
/// labeled nodes: run the seed walk, assemble the quadratic objective, solve
/// it over the simplex (or the sum-to-one hyperplane when unconstrained),
/// and diffuse. With a dictionary the walk steps are first mixed into
/// dictionary atoms and the coefficients weight atoms instead of steps.
inline std::vector<ClassDiffusion> fit_adadif(const Graph& g, const LabeledSet& ls,
                                              const HyperParams& hp) {
    std::vector<ClassDiffusion> out;
    Eigen::VectorXd scratch(g.order());
    for (ClassId c : ls.active_classes()) {
        const SeedVector seed = make_seed(ls.members(c));
        Eigen::MatrixXd basis, diff;
        if (hp.dictionary) {
            basis = dictionary_diffusions(g, seed, hp.K, *hp.dictionary);
            diff.resize(basis.rows(), basis.cols());
            for (Eigen::Index d = 0; d < basis.cols(); ++d) {
                apply_transition(g, basis.col(d).data(), diff.col(d).data(), scratch.data());
                diff.col(d) = basis.col(d) - diff.col(d);
            }
        } else {
            const LandingProbabilities lp = landing_probabilities(g, seed, hp.K);
            basis = lp.steps;
            diff = differentials(lp);
        }
        const QuadraticSystem sys = assemble_system(g, basis, diff, ls, c, hp.lambda);
        Eigen::VectorXd theta = detail::solve_coefficients(sys, hp);
        out.push_back({c, basis * theta, std::move(theta)});
    }
    return out;
}

/// Diffusion with fixed coefficients: scores_c = sum_k theta_k p_c^(k),
/// accumulated in a streaming pass over the walk.
inline std::vector<ClassDiffusion> fit_fixed(const Graph& g, const LabeledSet& ls,
                                             const Eigen::VectorXd& theta) {
    const int K = static_cast<int>(theta.size());
    if (K < 1) throw data_error("coefficient vector is empty");
    const NodeId n = g.order();
    std::vector<ClassDiffusion> out;
    Eigen::VectorXd cur(n), next(n), scratch(n);
    for (ClassId c : ls.active_classes()) {
        cur = make_seed(ls.members(c)).dense(n);
        Eigen::VectorXd scores = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < K; ++k) {
            apply_transition(g, cur.data(), next.data(), scratch.data());
            cur.swap(next);
            scores.noalias() += theta[k] * cur;
        }
        out.push_back({c, std::move(scores), theta});
    }
    return out;
}

/// Scores each class by its k-th landing probability alone; k = 0 scores by
/// the seed distribution itself.
inline std::vector<ClassDiffusion> kstep_classifier(const Graph& g, const LabeledSet& ls,
                                                    int k) {
    if (k < 0) throw data_error("step index must be nonnegative");
    if (k == 0) {
        std::vector<ClassDiffusion> out;
        for (ClassId c : ls.active_classes())
            out.push_back({c, make_seed(ls.members(c)).dense(g.order()), Eigen::VectorXd()});
        return out;
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
    theta[k - 1] = 1.0;
    return fit_fixed(g, ls, theta);
}

/// Iterative label propagation: scores start as class indicators on labeled
/// nodes, are diffused through the transition operator, and labeled rows are
/// clamped back to their indicators after every step.
inline std::vector<ClassDiffusion> label_propagation(const Graph& g, const LabeledSet& ls,
                                                     int iterations = 50) {
    if (iterations < 1) throw data_error("iterations must be at least 1");
    const NodeId n = g.order();
    std::vector<ClassDiffusion> out;
    Eigen::VectorXd cur(n), next(n), scratch(n);
    for (ClassId c : ls.active_classes()) {
        Eigen::VectorXd clamp = Eigen::VectorXd::Zero(n);
        for (NodeId i : ls.members(c)) clamp[i] = 1.0;
        cur = clamp;
        for (int it = 0; it < iterations; ++it) {
            apply_transition(g, cur.data(), next.data(), scratch.data());
            cur.swap(next);
            for (std::size_t p = 0; p < ls.size(); ++p)
                cur[ls.nodes[p]] = clamp[ls.nodes[p]];
        }
        out.push_back({c, cur, Eigen::VectorXd()});
    }
    return out;
}

} // namespace adadif
