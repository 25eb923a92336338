#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "adadif/errors.hpp"
#include "adadif/graph.hpp"
#include "adadif/spectral.hpp"
#include "adadif/walks.hpp"

namespace adadif {

/// Inputs of the distinguishability-threshold bounds: the spectral decay
/// rate, the global maximum degree, and per-seed-set minimum degrees and
/// sizes.
struct BoundInputs {
    double gamma = 0.0;
    double mu_prime = 0.0;
    double d_max = 0.0;
    double d_min_pos = 0.0;
    double d_min_neg = 0.0;
    std::int64_t n_pos = 0;
    std::int64_t n_neg = 0;
};

inline BoundInputs make_bound_inputs(const Graph& g, const SeedVector& pos,
                                     const SeedVector& neg, double gamma,
                                     const SpectralSummary& spectrum) {
    const auto min_deg = [&](const SeedVector& s) {
        double m = g.degrees[s.nodes.front()];
        for (NodeId i : s.nodes) m = std::min(m, g.degrees[i]);
        return m;
    };
    BoundInputs in;
    in.gamma = gamma;
    in.mu_prime = spectrum.mu_prime;
    in.d_max = g.degrees.maxCoeff();
    in.d_min_pos = min_deg(pos);
    in.d_min_neg = min_deg(neg);
    in.n_pos = static_cast<std::int64_t>(pos.nodes.size());
    in.n_neg = static_cast<std::int64_t>(neg.nodes.size());
    return in;
}

inline BoundInputs make_bound_inputs(const Graph& g, const SeedVector& pos,
                                     const SeedVector& neg, double gamma) {
    return make_bound_inputs(g, pos, neg, gamma, spectral_summary(g));
}

namespace detail {

inline void check_bound_inputs(const BoundInputs& in) {
    if (!(in.gamma > 0.0)) throw data_error("gamma must be positive");
    if (in.n_pos < 1 || in.n_neg < 1) throw data_error("both seed sets must be nonempty");
    if (!(in.d_min_pos > 0.0 && in.d_min_neg > 0.0 && in.d_max > 0.0))
        throw data_error("degrees must be positive");
    if (!(in.mu_prime > 1e-8))
        throw structure_error("spectral decay rate is not positive; "
                              "the graph is bipartite or disconnected");
}

inline double bound_bracket(const BoundInputs& in) {
    return (2.0 * std::sqrt(in.d_max) / in.gamma) *
           (1.0 / std::sqrt(in.d_min_neg * static_cast<double>(in.n_neg)) +
            1.0 / std::sqrt(in.d_min_pos * static_cast<double>(in.n_pos)));
}

} // namespace detail

/// Walk length beyond which any simplex-weighted diffusion pair from the two
/// seed sets stays gamma-close: ceil((1/mu') log[(2 sqrt(d_max)/gamma)
/// (1/sqrt(d_min- |L-|) + 1/sqrt(d_min+ |L+|))]), floored at 1.
inline int kgamma_bound(const BoundInputs& in) {
    detail::check_bound_inputs(in);
    const double raw = std::log(detail::bound_bracket(in)) / in.mu_prime;
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

/// Same threshold when the coefficients decay geometrically with restart
/// probability 1 - alpha: the alpha^K factor sharpens the rate to
/// mu' - log(alpha) and rescales gamma by 1/(1 - alpha).
inline int kgamma_bound_ppr(const BoundInputs& in, double alpha) {
    detail::check_bound_inputs(in);
    if (!(alpha > 0.0 && alpha < 1.0)) throw data_error("alpha must lie in (0, 1)");
    const double raw =
        std::log(detail::bound_bracket(in) * (1.0 - alpha)) / (in.mu_prime - std::log(alpha));
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

/// Smallest K at which the worst simplex-weighted difference between the two
/// truncated diffusions drops to gamma. The worst case over the simplex is
/// attained by putting all mass on the last step, so the tracked norm is
/// ||(p+^(K) - p+^(K+1)) - (p-^(K) - p-^(K+1))||_2.
struct EmpiricalThreshold {
    bool found = false;
    int K = 0;
    double norm_at_K = 0.0; ///< norm at the returned K (or at K_max if not found)
    double min_norm = 0.0;  ///< smallest norm seen over the search
};

inline EmpiricalThreshold empirical_kgamma(const Graph& g, const SeedVector& pos,
                                           const SeedVector& neg, double gamma, int K_max) {
    if (!(gamma > 0.0)) throw data_error("gamma must be positive");
    if (K_max < 1) throw data_error("K_max must be at least 1");
    const NodeId n = g.order();
    Eigen::VectorXd p_cur = pos.dense(n), m_cur = neg.dense(n);
    Eigen::VectorXd p_next(n), m_next(n), scratch(n);
    apply_transition(g, p_cur.data(), p_next.data(), scratch.data());
    apply_transition(g, m_cur.data(), m_next.data(), scratch.data());
    p_cur.swap(p_next);
    m_cur.swap(m_next); // both now at step 1

    EmpiricalThreshold out;
    out.min_norm = std::numeric_limits<double>::infinity();
    for (int K = 1; K <= K_max; ++K) {
        apply_transition(g, p_cur.data(), p_next.data(), scratch.data());
        apply_transition(g, m_cur.data(), m_next.data(), scratch.data());
        const double norm = ((p_cur - p_next) - (m_cur - m_next)).norm();
        out.min_norm = std::min(out.min_norm, norm);
        if (norm <= gamma) {
            out.found = true;
            out.K = K;
            out.norm_at_K = norm;
            return out;
        }
        p_cur.swap(p_next);
        m_cur.swap(m_next);
        out.norm_at_K = norm;
    }
    out.K = K_max;
    return out;
}

} // namespace adadif
