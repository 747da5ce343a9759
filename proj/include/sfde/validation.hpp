#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sfde/cq.hpp"
#include "sfde/fbm.hpp"
#include "sfde/mlf.hpp"
#include "sfde/solver.hpp"

// Statistical and convergence checks shared by the selftest command and the test suites.
namespace sfde::validation {

struct CovarianceReport {
    double max_z = 0.0;  ///< largest |sample - exact| / standard error over all entries
    Eigen::Index worst_row = 0;
    Eigen::Index worst_col = 0;
    bool passed = false;
};

/// Draws n_paths increment vectors from `sampler` and compares the sample second
/// moments E[dW_n dW_m] with the exact matrix. The standard error of each entry
/// uses the Gaussian identity Var(X_n X_m) = C_nm^2 + C_nn C_mm.
template <class Sampler, class URBG>
CovarianceReport covariance_check(const Sampler& sampler, double h, double tau, std::size_t steps,
                                  std::size_t n_paths, URBG& rng, double z_limit = 5.0) {
    const auto L = static_cast<Eigen::Index>(steps);
    const Eigen::MatrixXd exact = fbm::increment_covariance_matrix(h, tau, steps);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(L, L);
    constexpr std::size_t block = 1024;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(block), L);
    for (std::size_t done = 0; done < n_paths; done += block) {
        const std::size_t rows = std::min(block, n_paths - done);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto path = sampler.sample(rng);
            for (Eigen::Index c = 0; c < L; ++c) X(static_cast<Eigen::Index>(r), c) = path.increments[c];
        }
        const auto used = X.topRows(static_cast<Eigen::Index>(rows));
        second.noalias() += used.transpose() * used;
    }
    second /= static_cast<double>(n_paths);

    CovarianceReport rep;
    for (Eigen::Index i = 0; i < L; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double var = exact(i, j) * exact(i, j) + exact(i, i) * exact(j, j);
            const double z = std::abs(second(i, j) - exact(i, j)) / std::sqrt(var / static_cast<double>(n_paths));
            if (z > rep.max_z) {
                rep.max_z = z;
                rep.worst_row = i;
                rep.worst_col = j;
            }
        }
    rep.passed = rep.max_z <= z_limit;
    return rep;
}

/// Least-squares slope of log(error) against log(step).
inline double fitted_order(std::span<const double> steps, std::span<const double> errors) {
    const auto n = static_cast<double>(steps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double x = std::log(steps[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Orders log(e_i/e_{i+1}) / log(tau_i/tau_{i+1}) of successive refinements.
inline std::vector<double> pairwise_orders(std::span<const double> steps, std::span<const double> errors) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i)
        out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1]));
    return out;
}

/// u^L of the single-mode scheme with symbol lambda_s, constant forcing and no noise.
inline double solve_scalar_relaxation(double alpha, double lambda_s, double forcing, double t_final,
                                      std::size_t steps) {
    solver::ModelParams p;
    p.alpha = alpha;
    p.t_final = t_final;
    p.f = solver::Nonlinearity::modal(Eigen::VectorXd::Constant(1, forcing));
    auto traj = solver::make_trajectory(p, solver::Discretization::make(t_final, 1, steps));
    traj.symbol[0] = lambda_s;
    const solver::Stepper stepper(traj);
    const auto zero = spectral::SpectralField::zeros(1);
    for (std::size_t n = 1; n <= steps; ++n) stepper.advance(traj, n, zero);
    return traj.states(static_cast<Eigen::Index>(steps), 0);
}

/// Errors of solve_scalar_relaxation against the Mittag-Leffler reference at T for L = T/tau.
inline std::vector<double> scalar_relaxation_errors(double alpha, double lambda_s, double forcing, double t_final,
                                                    std::span<const std::size_t> step_counts) {
    const double exact = mlf::linear_mode_reference(lambda_s, alpha, forcing, t_final);
    std::vector<double> out;
    for (std::size_t L : step_counts)
        out.push_back(std::abs(solve_scalar_relaxation(alpha, lambda_s, forcing, t_final, L) - exact));
    return out;
}

/// Coefficients of (1 - zeta)^a by exponentiating the series of a log(1 - zeta)
/// (Miller's recurrence n b_n = sum_k k c_k b_{n-k}), carried in long double.
inline std::vector<long double> binomial_series_oracle(long double a, std::size_t count) {
    std::vector<long double> b(count, 0.0L);
    b[0] = 1.0L;
    for (std::size_t n = 1; n < count; ++n) {
        long double acc = 0.0L;
        for (std::size_t k = 1; k <= n; ++k) acc += static_cast<long double>(k) * (-a / static_cast<long double>(k)) * b[n - k];
        b[n] = acc / static_cast<long double>(n);
    }
    return b;
}

} // namespace sfde::validation
