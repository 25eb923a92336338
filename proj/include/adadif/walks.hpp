#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadif/errors.hpp"
#include "adadif/graph.hpp"

namespace adadif {

/// Uniform distribution over a set of seed nodes: mass 1/|S| on each.
struct SeedVector {
    std::vector<NodeId> nodes; ///< sorted, unique, nonempty

    double mass() const { return 1.0 / static_cast<double>(nodes.size()); }

    Eigen::VectorXd dense(NodeId n) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        const double m = mass();
        for (NodeId i : nodes) v[i] = m;
        return v;
    }
};

inline SeedVector make_seed(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.empty()) throw data_error("seed set is empty");
    if (nodes.front() < 0) throw data_error("seed node index is negative");
    return SeedVector{std::move(nodes)};
}

/// Landing probabilities of a K-step walk from a seed distribution.
/// Column k-1 of `steps` holds p^(k) = H^k v; `extra` holds p^(K+1).
/// Each column is produced by exactly one transition apply of the previous
/// one, so consecutive columns satisfy the step relation bit-for-bit.
struct LandingProbabilities {
    Eigen::MatrixXd steps; ///< order() x K
    Eigen::VectorXd extra; ///< p^(K+1)
    int K = 0;
};

inline LandingProbabilities landing_probabilities(const Graph& g, const SeedVector& seed,
                                                  int K) {
    if (K < 1) throw data_error("walk length K must be at least 1");
    const NodeId n = g.order();
    for (NodeId i : seed.nodes)
        if (i >= n) throw data_error("seed node index " + std::to_string(i) + " out of range");

    LandingProbabilities lp;
    lp.K = K;
    lp.steps.resize(n, K);
    lp.extra.resize(n);

    Eigen::VectorXd cur = seed.dense(n), scratch(n);
    for (int k = 0; k < K; ++k) {
        apply_transition(g, cur.data(), lp.steps.col(k).data(), scratch.data());
        cur = lp.steps.col(k);
    }
    apply_transition(g, cur.data(), lp.extra.data(), scratch.data());
    return lp;
}

/// Step differentials: column k-1 is p^(k) - p^(k+1). Every column sums to
/// zero since consecutive landing probabilities are both distributions.
inline Eigen::MatrixXd differentials(const LandingProbabilities& lp) {
    const int K = lp.K;
    Eigen::MatrixXd d(lp.steps.rows(), K);
    for (int k = 0; k + 1 < K; ++k) d.col(k) = lp.steps.col(k) - lp.steps.col(k + 1);
    d.col(K - 1) = lp.steps.col(K - 1) - lp.extra;
    return d;
}

/// Mixes the K landing probabilities through a K x D coefficient matrix in a
/// single streaming pass: column d of the result is sum_k C(k,d) p^(k).
/// Every column of C must lie on the probability simplex.
inline Eigen::MatrixXd dictionary_diffusions(const Graph& g, const SeedVector& seed, int K,
                                             const Eigen::MatrixXd& coeffs,
                                             double simplex_tol = 1e-8) {
    if (coeffs.rows() != K)
        throw data_error("dictionary has " + std::to_string(coeffs.rows()) +
                         " rows, expected K = " + std::to_string(K));
    const auto D = coeffs.cols();
    if (D < 1) throw data_error("dictionary has no columns");
    for (Eigen::Index d = 0; d < D; ++d) {
        if (coeffs.col(d).minCoeff() < -simplex_tol ||
            std::abs(coeffs.col(d).sum() - 1.0) > simplex_tol)
            throw data_error("dictionary column " + std::to_string(d) +
                             " is not on the probability simplex");
    }

    const NodeId n = g.order();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, D);
    Eigen::VectorXd cur = seed.dense(n), next(n), scratch(n);
    for (int k = 0; k < K; ++k) {
        apply_transition(g, cur.data(), next.data(), scratch.data());
        cur.swap(next);
        for (Eigen::Index d = 0; d < D; ++d) out.col(d) += coeffs(k, d) * cur;
    }
    return out;
}

/// Leave-one-out walks for a class seed set: entry i of the result holds the
/// landing probabilities seeded at class_seeds minus its i-th node, sampled
/// at `rows` (one row per entry of `rows`, K columns). The mean of the
/// outputs over i reproduces the full-seed walk.
inline std::vector<Eigen::MatrixXd> leave_one_out_walks(const Graph& g,
                                                        const std::vector<NodeId>& class_seeds,
                                                        int K,
                                                        const std::vector<NodeId>& rows) {
    if (class_seeds.size() < 2)
        throw data_error("leave-one-out walks need at least two class seeds");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(class_seeds.size());
    const auto nrows = static_cast<Eigen::Index>(rows.size());
    for (std::size_t i = 0; i < class_seeds.size(); ++i) {
        std::vector<NodeId> held = class_seeds;
        held.erase(held.begin() + static_cast<std::ptrdiff_t>(i));
        const LandingProbabilities lp = landing_probabilities(g, make_seed(std::move(held)), K);
        Eigen::MatrixXd m(nrows, K);
        for (Eigen::Index r = 0; r < nrows; ++r) m.row(r) = lp.steps.row(rows[r]);
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace adadif
