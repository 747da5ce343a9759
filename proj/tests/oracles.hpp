#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace oracle {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

/// Coefficients of (1 - zeta)^a from exp(a log(1 - zeta)) via Miller's recurrence.
inline std::vector<long double> binomial_power_series(long double a, std::size_t count) {
    std::vector<long double> log_series(count, 0.0L); // a log(1 - zeta) = -a sum zeta^k / k
    for (std::size_t k = 1; k < count; ++k) log_series[k] = -a / static_cast<long double>(k);
    std::vector<long double> b(count, 0.0L);
    b[0] = 1.0L;
    for (std::size_t n = 1; n < count; ++n) {
        long double acc = 0.0L;
        for (std::size_t k = 1; k <= n; ++k) acc += static_cast<long double>(k) * log_series[k] * b[n - k];
        b[n] = acc / static_cast<long double>(n);
    }
    return b;
}

/// (-1)^j binom(a, j) = Gamma(j - a) / (Gamma(-a) Gamma(j + 1)).
inline long double binomial_gamma_form(long double a, std::size_t j) {
    if (j == 0) return 1.0L;
    const long double jj = static_cast<long double>(j);
    // Gamma(-a) < 0 for a in (0,1); Gamma(j - a) > 0 for j >= 1
    const long double mag = std::exp(std::lgamma(jj - a) - std::lgamma(-a) - std::lgamma(jj + 1.0L));
    return -mag;
}

/// Coefficients of (1 - zeta)^a by sampling on a circle of radius rho and an inverse FFT.
inline std::vector<double> binomial_fft(double a, std::size_t count) {
    const std::size_t m = 4 * count;
    const double rho = std::pow(1e-16, 1.0 / (2.0 * static_cast<double>(m)));
    std::vector<std::complex<double>> samples(m), coeffs;
    for (std::size_t k = 0; k < m; ++k) {
        const auto zeta = std::polar(rho, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
        samples[k] = std::pow(1.0 - zeta, a);
    }
    Eigen::FFT<double> fft;
    fft.fwd(coeffs, samples);
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j)
        out[j] = coeffs[j].real() / static_cast<double>(m) / std::pow(rho, static_cast<double>(j));
    return out;
}

/// Kolmogorov-Smirnov p-value of samples against N(0, sigma^2).
inline double ks_normal_pvalue(std::vector<double> x, double sigma) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-x[i] / (sigma * std::numbers::sqrt2));
        d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
    }
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double q = 0.0;
    for (int j = 1; j <= 100; ++j)
        q += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    return std::clamp(q, 0.0, 1.0);
}

/// Linear-time two-sample energy test. Rows are samples; returns the one-sided p-value
/// for H0: equal distributions (large statistic rejects).
inline double energy_test_pvalue(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    const Eigen::Index pairs = std::min(x.rows(), y.rows()) / 2;
    std::vector<double> h(static_cast<std::size_t>(pairs));
    for (Eigen::Index i = 0; i < pairs; ++i) {
        const auto x1 = x.row(2 * i), x2 = x.row(2 * i + 1);
        const auto y1 = y.row(2 * i), y2 = y.row(2 * i + 1);
        h[static_cast<std::size_t>(i)] =
            (x1 - y2).norm() + (x2 - y1).norm() - (x1 - x2).norm() - (y1 - y2).norm();
    }
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= static_cast<double>(pairs);
    double var = 0.0;
    for (double v : h) var += (v - mean) * (v - mean);
    var /= static_cast<double>(pairs - 1);
    const double z = mean / std::sqrt(var / static_cast<double>(pairs));
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// Scalar backward-Euler CQ scheme written as one dense lower-triangular system
/// M u = b with M(n,n-j) = delta_{j0}/tau - delta_{j1}/tau + lambda d_j.
inline Eigen::VectorXd dense_scalar_solution(const std::vector<double>& d, double lambda, double tau,
                                             const Eigen::VectorXd& rhs) {
    const Eigen::Index L = rhs.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(L, L);
    for (Eigen::Index n = 0; n < L; ++n)
        for (Eigen::Index j = 0; j <= n; ++j) {
            double v = lambda * d[static_cast<std::size_t>(j)];
            if (j == 0) v += 1.0 / tau;
            if (j == 1) v -= 1.0 / tau;
            m(n, n - j) = v;
        }
    return m.triangularView<Eigen::Lower>().solve(rhs);
}

/// E_{alpha,1}(-x) ~ -sum_{k>=1} (-x)^{-k} / Gamma(1 - alpha k) for large x.
inline double mittag_leffler_asymptotic(double alpha, double x, int terms) {
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double g = 1.0 - alpha * k;
        if (g <= 0.0 && std::floor(g) == g) continue; // 1/Gamma at a pole is zero
        sum -= std::pow(-x, -k) / std::tgamma(g);
    }
    return sum;
}

} // namespace oracle
