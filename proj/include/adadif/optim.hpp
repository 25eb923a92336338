#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "adadif/errors.hpp"

namespace adadif {

/// Quadratic objective theta^T A theta + theta^T b with symmetric A.
struct QuadraticSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

struct CoefficientVector {
    Eigen::VectorXd theta;
    int iterations = 0;
    double kkt_residual = 0.0;
};

/// Euclidean projection onto the probability simplex, by the sort-and-
/// threshold rule: out_i = max(x_i - tau, 0) with tau chosen so the result
/// sums to one. O(K log K).
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& x) {
    const auto K = x.size();
    std::vector<double> u(x.data(), x.data() + K);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double running = 0.0, prefix = 1.0;
    Eigen::Index rho = 1;
    for (Eigen::Index j = 0; j < K; ++j) {
        running += u[j];
        if (u[j] - (running - 1.0) / static_cast<double>(j + 1) > 0.0) {
            rho = j + 1;
            prefix = running;
        }
    }
    const double tau = (prefix - 1.0) / static_cast<double>(rho);
    return (x.array() - tau).max(0.0).matrix();
}

struct SimplexQpOptions {
    double tol = 1e-9;      ///< sup-norm of the projected-gradient fixed-point residual
    int max_iter = 10000;
    double psd_tol = -1e-8; ///< eigenvalues below this trigger a diagonal shift
};

namespace detail {

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A) {
    return 0.5 * (A + A.transpose());
}

} // namespace detail

/// Minimizes theta^T A theta + theta^T b over the probability simplex by
/// accelerated projected gradient with adaptive restart. A is symmetrized;
/// if its smallest eigenvalue falls below psd_tol the diagonal is shifted
/// up, which leaves the minimizer of the constrained problem essentially
/// unchanged. Convergence is declared on the fixed-point residual
/// || theta - proj(theta - grad) ||_inf <= tol.
inline CoefficientVector solve_simplex_qp(const QuadraticSystem& sys,
                                          SimplexQpOptions opt = {},
                                          const Eigen::VectorXd* warm_start = nullptr) {
    const auto K = sys.b.size();
    if (sys.A.rows() != K || sys.A.cols() != K)
        throw data_error("quadratic system dimensions disagree");

    Eigen::MatrixXd A = detail::symmetrized(sys.A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    double shift = 0.0;
    if (lo < opt.psd_tol) shift = -lo + 1e-10;
    if (shift > 0.0) A.diagonal().array() += shift;

    const double lipschitz = std::max(2.0 * (hi + shift), 1e-12);
    const double step = 1.0 / lipschitz;

    const auto grad = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
        return 2.0 * (A * t) + sys.b;
    };
    const auto value = [&](const Eigen::VectorXd& t) {
        return t.dot(A * t) + t.dot(sys.b);
    };
    const auto residual = [&](const Eigen::VectorXd& t) {
        return (t - project_simplex(t - grad(t))).cwiseAbs().maxCoeff();
    };

    Eigen::VectorXd theta = warm_start && warm_start->size() == K
                                ? project_simplex(*warm_start)
                                : Eigen::VectorXd::Constant(K, 1.0 / static_cast<double>(K));
    Eigen::VectorXd z = theta;
    double momentum = 1.0;
    double f_prev = value(theta);
    double res = residual(theta);

    for (int it = 1; it <= opt.max_iter; ++it) {
        if (res <= opt.tol) return {theta, it - 1, res};
        Eigen::VectorXd next = project_simplex(z - step * grad(z));
        const double f_next = value(next);
        if (f_next > f_prev) { // restart momentum from the last good point
            z = theta;
            momentum = 1.0;
            next = project_simplex(z - step * grad(z));
        }
        const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        z = next + ((momentum - 1.0) / m_next) * (next - theta);
        theta = next;
        f_prev = value(theta);
        momentum = m_next;
        res = residual(theta);
    }
    if (res <= opt.tol) return {theta, opt.max_iter, res};
    throw convergence_error("simplex QP did not converge",
                            {theta.data(), theta.data() + K}, res);
}

/// Minimizes theta^T A theta + theta^T b subject to 1^T theta = 1 only
/// (no sign constraint), in closed form from the stationarity conditions
///   2(A + ridge I) theta + b + nu 1 = 0,  1^T theta = 1.
inline Eigen::VectorXd solve_hyperplane_qp(const QuadraticSystem& sys, double ridge) {
    const auto K = sys.b.size();
    if (sys.A.rows() != K || sys.A.cols() != K)
        throw data_error("quadratic system dimensions disagree");
    if (ridge < 0.0) throw data_error("ridge must be nonnegative");

    Eigen::MatrixXd A = detail::symmetrized(sys.A);
    A.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> fac(A);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(K);
    const Eigen::VectorXd ai_b = fac.solve(sys.b);
    const Eigen::VectorXd ai_1 = fac.solve(ones);
    const double denom = ones.dot(ai_1);
    if (fac.info() != Eigen::Success || !std::isfinite(denom) || std::abs(denom) < 1e-300)
        throw numerical_error("hyperplane QP system is singular; increase the ridge");

    const double nu = -(2.0 + ones.dot(ai_b)) / denom;
    Eigen::VectorXd theta = -0.5 * (ai_b + nu * ai_1);

    const double scale = std::max({1.0, A.cwiseAbs().maxCoeff(), sys.b.cwiseAbs().maxCoeff()});
    const double stat = (2.0 * (A * theta) + sys.b + nu * ones).cwiseAbs().maxCoeff();
    if (!theta.allFinite() || stat > 1e-6 * scale)
        throw numerical_error("hyperplane QP solution failed the stationarity check; "
                              "increase the ridge");
    return theta;
}

/// Row-wise group soft-threshold: each row x becomes
/// x * max(0, 1 - lambda / (2 ||x||_2)), so rows with ||x|| <= lambda/2
/// vanish. lambda = 0 is the identity.
inline Eigen::MatrixXd row_group_soft_threshold(const Eigen::MatrixXd& X, double lambda) {
    if (lambda < 0.0) throw data_error("threshold must be nonnegative");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double norm = X.row(i).norm();
        const double factor = norm > 0.0 ? std::max(0.0, 1.0 - lambda / (2.0 * norm)) : 0.0;
        out.row(i) = factor * X.row(i);
    }
    return out;
}

} // namespace adadif
