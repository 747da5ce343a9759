#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sfde/error.hpp"

// Backward-Euler convolution quadrature for the Riemann-Liouville derivative of order a.
namespace sfde::cq {

/// Coefficients d_j of ((1 - zeta)/tau)^a = sum_j d_j zeta^j, j < size().
struct CqWeightTable {
    double order = 0.0;
    double tau = 1.0;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double operator[](std::size_t j) const { return weights[j]; }
};

inline CqWeightTable cq_weights(double a, double tau, std::size_t count) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("cq", "order must lie in (0,1), got " + std::to_string(a));
    if (!(tau > 0.0)) throw DomainError("cq", "step size must be positive");
    if (count < 1) throw DomainError("cq", "need at least one weight");
    CqWeightTable t{a, tau, std::vector<double>(count)};
    t.weights[0] = std::pow(tau, -a);
    for (std::size_t j = 1; j < count; ++j) {
        const auto jj = static_cast<double>(j);
        t.weights[j] = t.weights[j - 1] * (jj - 1.0 - a) / jj;
    }
    return t;
}

/// sum_{i=0}^{n-1} d_i history[n-i] with n = history.size() - 1; history[j] is the value at level j.
inline double apply_cq_history(const CqWeightTable& w, std::span<const double> history) {
    if (history.empty()) return 0.0;
    const std::size_t n = history.size() - 1;
    if (n > w.size())
        throw Error("cq", "history of " + std::to_string(n) + " levels exceeds weight table of size " +
                              std::to_string(w.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w.weights[i] * history[n - i];
    return acc;
}

} // namespace sfde::cq
