#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "adadif/errors.hpp"
#include "adadif/graph.hpp"
#include "adadif/random.hpp"

namespace adadif {

/// Extremal spectrum of the normalized Laplacian L~ = I - D^{-1/2} W D^{-1/2}:
/// mu2 (smallest nonzero eigenvalue), muN (largest), and the decay rate
/// mu_prime = min(mu2, 2 - muN). mu_prime ~ 0 flags a (near-)bipartite graph.
struct SpectralSummary {
    double mu2 = 0.0;
    double muN = 0.0;
    double mu_prime = 0.0;
    int iterations_mu2 = 0;
    int iterations_muN = 0;
};

namespace detail {

/// y = D^{-1/2} W D^{-1/2} x.
inline void apply_normalized_adjacency(const Graph& g, const Eigen::VectorXd& inv_sqrt_deg,
                                       const double* x, double* y, double* scratch) {
    const NodeId n = g.order();
    for (NodeId j = 0; j < n; ++j) scratch[j] = x[j] * inv_sqrt_deg[j];
    for (NodeId i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k)
            acc += g.weights[k] * scratch[g.targets[k]];
        y[i] = acc * inv_sqrt_deg[i];
    }
}

/// Power iteration for the dominant eigenvalue of a symmetric PSD operator,
/// optionally deflating a known unit eigenvector. Returns the Rayleigh
/// quotient once the residual ||Av - lambda v|| drops to tol.
template <typename Op>
inline double power_iterate(Op&& apply, NodeId n, const Eigen::VectorXd* deflate,
                            double tol, int max_iter, std::uint64_t seed, int* iters_out) {
    std::mt19937_64 gen(seed);
    Eigen::VectorXd v(n), av(n);
    for (NodeId i = 0; i < n; ++i) v[i] = uniform_unit(gen) - 0.5;
    if (deflate) v -= (*deflate) * deflate->dot(v);
    const double nv = v.norm();
    if (nv == 0.0) v.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    else v /= nv;

    double lambda = 0.0, residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        apply(v, av);
        if (deflate) av -= (*deflate) * deflate->dot(av);
        lambda = v.dot(av);
        residual = (av - lambda * v).norm();
        if (residual <= tol) {
            if (iters_out) *iters_out = it;
            return lambda;
        }
        const double na = av.norm();
        if (na == 0.0) { // operator annihilates v: eigenvalue 0 exactly
            if (iters_out) *iters_out = it;
            return 0.0;
        }
        v = av / na;
    }
    throw convergence_error("spectral summary: power iteration did not reach tolerance",
                            {lambda}, residual);
}

} // namespace detail

/// Estimates mu2 and muN by shifted power iterations: muN from L~ itself
/// (spectrum in [0, 2], top = muN) and mu2 from 2I - L~ with the known top
/// eigenvector q1 = D^{1/2} 1 / sqrt(sum d) deflated (top becomes 2 - mu2).
/// The +I shifts keep both spectra nonnegative, so the dominant eigenvalue
/// is the wanted end even on near-bipartite graphs.
inline SpectralSummary spectral_summary(const Graph& g, double tol = 1e-8,
                                        int max_iter = 100000,
                                        std::uint64_t seed = 0x5eed5eedULL) {
    const NodeId n = g.order();
    if (n < 2) throw structure_error("spectral summary needs at least two nodes");
    if (!is_connected(g)) throw structure_error("graph is disconnected");

    Eigen::VectorXd inv_sqrt_deg = g.degrees.cwiseSqrt().cwiseInverse();
    Eigen::VectorXd q1 = g.degrees.cwiseSqrt() / std::sqrt(g.degree_sum);
    Eigen::VectorXd scratch(n);

    SpectralSummary s;
    const auto lap = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        detail::apply_normalized_adjacency(g, inv_sqrt_deg, x.data(), y.data(), scratch.data());
        y = x - y;
    };
    s.muN = detail::power_iterate(lap, n, nullptr, tol, max_iter,
                                  derive_seed(seed, 0), &s.iterations_muN);

    const auto shifted = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        detail::apply_normalized_adjacency(g, inv_sqrt_deg, x.data(), y.data(), scratch.data());
        y += x;
    };
    const double top = detail::power_iterate(shifted, n, &q1, tol, max_iter,
                                             derive_seed(seed, 1), &s.iterations_mu2);
    s.mu2 = 2.0 - top;
    s.mu_prime = std::min(s.mu2, 2.0 - s.muN);
    return s;
}

} // namespace adadif
