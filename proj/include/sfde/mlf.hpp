#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "sfde/error.hpp"

// Mittag-Leffler function E_{alpha,beta}(z) on the negative real axis, and the
// closed-form scalar solutions of the linear fractional relaxation equation built on it.
namespace sfde::mlf {

struct MlfParams {
    double alpha = 1.0;
    double beta = 1.0;
};

namespace detail {

struct SeriesResult {
    double value;
    double abs_sum; ///< sum of |terms|, a bound on the rounding error / eps
};

/// Taylor series sum_n z^n / Gamma(alpha n + beta). Empty if the truncation rule is not met in 300 terms.
inline std::optional<SeriesResult> series(const MlfParams& p, double z) {
    if (z == 0.0) {
        const double v = 1.0 / std::tgamma(p.beta);
        return SeriesResult{v, std::abs(v)};
    }
    const double log_abs_z = std::log(std::abs(z));
    double sum = 0.0;
    double abs_sum = 0.0;
    for (int n = 0; n < 300; ++n) {
        const double mag = std::exp(n * log_abs_z - std::lgamma(p.alpha * n + p.beta));
        const double term = (z < 0.0 && (n % 2 == 1)) ? -mag : mag;
        if (n > 0 && mag < 1e-16 * std::abs(sum)) return SeriesResult{sum, abs_sum};
        sum += term;
        abs_sum += mag;
    }
    return std::nullopt;
}

/// Trapezoid rule on the real line with halving until two successive levels agree.
template <class F>
std::optional<double> trapezoid_line(F&& f, double lo, double hi, double h0) {
    auto sum_at = [&](double h, double offset) {
        double s = 0.0;
        for (double v = lo + offset; v <= hi; v += h) s += f(v);
        return s;
    };
    double h = h0;
    double total = sum_at(h, 0.0);
    double previous = total * h;
    for (int level = 0; level < 6; ++level) {
        total += sum_at(h, 0.5 * h);
        h *= 0.5;
        const double current = total * h;
        if (std::abs(current - previous) <= 1e-13 * std::abs(current)) return current;
        previous = current;
    }
    return std::nullopt;
}

/// Laplace-spectrum representation for 0 < alpha < 1, beta in {1, 2}, z = -x < 0.
///   E_{alpha,1}(-x) = int exp(-e^v) g(q) dv
///   E_{alpha,2}(-x) = int (1 - exp(-e^v)) e^{-v} g(q) dv
/// with q = e^{alpha v} / x and g(q) = sin(alpha pi)/pi * q / (q^2 + 2 q cos(alpha pi) + 1).
inline std::optional<double> spectral_integral(const MlfParams& p, double z) {
    const double a = p.alpha;
    const double x = -z;
    const double sin_a = std::sin(a * std::numbers::pi);
    const double cos_a = std::cos(a * std::numbers::pi);
    const double log_x = std::log(x);
    auto g = [&](double v) {
        const double q = std::exp(a * v - log_x);
        return sin_a / std::numbers::pi * q / (q * q + 2.0 * q * cos_a + 1.0);
    };

    // distance from the real axis to the nearest singularity of the integrand
    const double strip = std::min(std::numbers::pi / 2.0, std::numbers::pi * (1.0 - a) / a);
    const double h0 = 2.0 * std::numbers::pi * 0.8 * strip / 40.0;
    const double lo = (std::log(1e-18 * a) + std::min(0.0, log_x)) / a;

    if (p.beta == 1.0) {
        const double hi = std::log(50.0);
        return trapezoid_line([&](double v) { return std::exp(-std::exp(v)) * g(v); }, lo, hi, h0);
    }
    const double hi = (2.0 * std::max(0.0, log_x) + 42.0) / (1.0 + a);
    return trapezoid_line([&](double v) { return -std::expm1(-std::exp(v)) * std::exp(-v) * g(v); }, lo, hi, h0);
}

} // namespace detail

/// E_{alpha,beta}(z) for real z <= 0.
///
/// alpha = 1 uses the exponential closed forms. Otherwise the Taylor series is
/// used while its rounding error, eps * sum|terms| / |sum|, stays below ~1e-13;
/// past that the Laplace-spectrum integral takes over (beta in {1, 2} only).
inline double mittag_leffler(const MlfParams& p, double z) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0))
        throw DomainError("mlf", "parameters must be positive, got alpha = " + std::to_string(p.alpha) +
                                     ", beta = " + std::to_string(p.beta));
    if (!(z <= 0.0)) throw DomainError("mlf", "argument must be <= 0, got " + std::to_string(z));

    if (p.alpha == 1.0 && (p.beta == 1.0 || p.beta == 2.0)) {
        if (p.beta == 1.0) return std::exp(z);
        return z == 0.0 ? 1.0 : std::expm1(z) / z;
    }

    if (auto s = detail::series(p, z); s && s->abs_sum <= 1e3 * std::abs(s->value)) return s->value;

    if (p.alpha < 1.0 && (p.beta == 1.0 || p.beta == 2.0)) {
        if (auto v = detail::spectral_integral(p, z)) return *v;
        throw Error("mlf", "integral representation did not converge at z = " + std::to_string(z) +
                               " (alpha = " + std::to_string(p.alpha) + ", beta = " + std::to_string(p.beta) + ")");
    }
    throw Error("mlf", "no accurate representation for z = " + std::to_string(z) + " (alpha = " +
                           std::to_string(p.alpha) + ", beta = " + std::to_string(p.beta) + ")");
}

/// E_alpha(-lambda_s t^alpha): relaxation kernel of one linear mode.
inline double relaxation_kernel(double lambda_s, double alpha, double t) {
    if (t < 0.0) throw DomainError("mlf", "time must be nonnegative");
    return mittag_leffler({alpha, 1.0}, -lambda_s * std::pow(t, alpha));
}

/// Solution at time t of u' + D^{1-alpha}(lambda_s u) = c, u(0) = 0:
/// int_0^t E_alpha(-lambda_s r^alpha) c dr = c t E_{alpha,2}(-lambda_s t^alpha).
inline double linear_mode_reference(double lambda_s, double alpha, double forcing, double t) {
    if (t < 0.0) throw DomainError("mlf", "time must be nonnegative");
    if (!(lambda_s > 0.0)) throw DomainError("mlf", "lambda_s must be positive");
    if (t == 0.0) return 0.0;
    return forcing * t * mittag_leffler({alpha, 2.0}, -lambda_s * std::pow(t, alpha));
}

} // namespace sfde::mlf
