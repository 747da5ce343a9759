#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "sfde/binary_io.hpp"
#include "sfde/error.hpp"

// Fractional Brownian motion increments on a uniform time grid.
namespace sfde::fbm {

namespace detail {

inline void check_hurst(double h) {
    if (!(h > 0.0 && h < 1.0))
        throw DomainError("fbm", "Hurst index must lie in (0,1), got " + std::to_string(h));
}

inline double abs_pow(double x, double p) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), p); }

} // namespace detail

/// E[W(t) W(u)] = (t^{2H} + u^{2H} - |t-u|^{2H}) / 2.
inline double fbm_covariance(double t, double u, double h) {
    detail::check_hurst(h);
    if (t < 0.0 || u < 0.0) throw DomainError("fbm", "times must be nonnegative");
    const double p = 2.0 * h;
    return 0.5 * (detail::abs_pow(t, p) + detail::abs_pow(u, p) - detail::abs_pow(t - u, p));
}

/// Autocovariance of fractional Gaussian noise at integer lag, for step tau.
inline double increment_autocovariance(double h, double tau, long lag) {
    const double p = 2.0 * h;
    const auto k = static_cast<double>(lag);
    return 0.5 * std::pow(tau, p) *
           (detail::abs_pow(k + 1.0, p) + detail::abs_pow(k - 1.0, p) - 2.0 * detail::abs_pow(k, p));
}

/// E[dW_n dW_m] for the L increments on the grid t_n = n tau.
inline Eigen::MatrixXd increment_covariance_matrix(double h, double tau, std::size_t steps) {
    detail::check_hurst(h);
    if (!(tau > 0.0)) throw DomainError("fbm", "step size must be positive");
    const auto L = static_cast<Eigen::Index>(steps);
    Eigen::MatrixXd c(L, L);
    for (Eigen::Index n = 0; n < L; ++n)
        for (Eigen::Index m = 0; m < L; ++m) c(n, m) = increment_autocovariance(h, tau, static_cast<long>(n - m));
    return c;
}

/// Identifies the independent random stream of one (mode, trajectory) pair.
struct StreamId {
    std::uint64_t master_seed = 0;
    std::uint64_t mode = 0;
    std::uint64_t trajectory = 0;

    bool operator==(const StreamId&) const = default;
};

using Engine = std::mt19937_64;

/// Engine for a stream; distinct ids feed distinct seed sequences.
inline Engine make_engine(const StreamId& id) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(id.master_seed), hi(id.master_seed), lo(id.mode), hi(id.mode),
                      lo(id.trajectory), hi(id.trajectory), 0x66626d75u};
    return Engine(seq);
}

struct FbmPath {
    double h = 0.5;
    double tau = 1.0;
    std::vector<double> increments; ///< entry n-1 is W(t_n) - W(t_{n-1})

    std::size_t size() const { return increments.size(); }

    /// W(t_L).
    double endpoint() const {
        double w = 0.0;
        for (double d : increments) w += d;
        return w;
    }
};

/// Exact sampler by Cholesky factorization of the increment covariance; O(L^2) per path after an O(L^3) setup.
class CholeskySampler {
public:
    CholeskySampler(double h, double tau, std::size_t steps) : h_(h), tau_(tau) {
        const Eigen::MatrixXd cov = increment_covariance_matrix(h, tau, steps);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw Error("fbm", "Cholesky factorization of the " + std::to_string(steps) + "x" +
                                   std::to_string(steps) + " increment covariance failed (H = " +
                                   std::to_string(h) + "); matrix is numerically not positive definite");
        factor_ = llt.matrixL();
    }

    template <class URBG>
    FbmPath sample(URBG& rng) const {
        std::normal_distribution<double> normal;
        const auto L = factor_.rows();
        Eigen::VectorXd z(L);
        for (Eigen::Index i = 0; i < L; ++i) z[i] = normal(rng);
        const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
        return FbmPath{h_, tau_, std::vector<double>(x.data(), x.data() + L)};
    }

private:
    double h_;
    double tau_;
    Eigen::MatrixXd factor_;
};

/// Circulant-embedding (Davies-Harte) sampler; O(L log L) per path.
class CirculantSampler {
public:
    CirculantSampler(double h, double tau, std::size_t steps) : h_(h), tau_(tau), steps_(steps) {
        detail::check_hurst(h);
        if (!(tau > 0.0)) throw DomainError("fbm", "step size must be positive");
        if (steps < 1) throw DomainError("fbm", "need at least one step");
        const std::size_t m = 2 * steps;
        std::vector<std::complex<double>> row(m), eig;
        // unit-step autocovariances; the tau^{2H} scale is applied to the square roots
        for (std::size_t j = 0; j <= steps; ++j) row[j] = increment_autocovariance(h, 1.0, static_cast<long>(j));
        for (std::size_t j = 1; j < steps; ++j) row[m - j] = row[j];
        fft_.fwd(eig, row);
        const double scale = std::pow(tau, h); // sqrt(tau^{2H})
        sqrt_eig_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            double lam = eig[j].real();
            if (lam < -1e-10)
                throw Error("fbm", "circulant embedding has negative eigenvalue " + std::to_string(lam) +
                                       " at index " + std::to_string(j));
            if (lam < 0.0) lam = 0.0;
            sqrt_eig_[j] = scale * std::sqrt(lam / static_cast<double>(m));
        }
    }

    template <class URBG>
    FbmPath sample(URBG& rng) const {
        std::normal_distribution<double> normal;
        const std::size_t m = sqrt_eig_.size();
        std::vector<std::complex<double>> z(m), y;
        for (std::size_t j = 0; j < m; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            z[j] = sqrt_eig_[j] * std::complex<double>(re, im);
        }
        fft_.fwd(y, z);
        FbmPath path{h_, tau_, std::vector<double>(steps_)};
        for (std::size_t n = 0; n < steps_; ++n) path.increments[n] = y[n].real();
        return path;
    }

private:
    double h_;
    double tau_;
    std::size_t steps_;
    std::vector<double> sqrt_eig_;
    mutable Eigen::FFT<double> fft_;
};

template <class URBG>
FbmPath sample_fbm_cholesky(double h, double tau, std::size_t steps, URBG& rng) {
    return CholeskySampler(h, tau, steps).sample(rng);
}

template <class URBG>
FbmPath sample_fbm_circulant(double h, double tau, std::size_t steps, URBG& rng) {
    return CirculantSampler(h, tau, steps).sample(rng);
}

/// Sums each block of `factor` consecutive increments: the same path on the grid with step factor*tau.
inline FbmPath coarsen(const FbmPath& fine, std::size_t factor) {
    if (factor < 1 || fine.size() % factor != 0)
        throw Error("fbm", "cannot coarsen " + std::to_string(fine.size()) + " increments by factor " +
                               std::to_string(factor));
    FbmPath out{fine.h, fine.tau * static_cast<double>(factor), std::vector<double>(fine.size() / factor, 0.0)};
    for (std::size_t n = 0; n < fine.size(); ++n) out.increments[n / factor] += fine.increments[n];
    return out;
}

/// Independent fBm paths W_k for modes k = 1..n_modes and a contiguous range of trajectories.
struct FbmEnsemble {
    double h = 0.5;
    double tau = 1.0;
    std::size_t steps = 0;
    std::size_t n_modes = 0;
    std::size_t first_traj = 0;
    std::size_t n_traj = 0;
    std::uint64_t master_seed = 0;
    std::vector<FbmPath> paths; ///< mode-major: index (k-1)*n_traj + (i-first_traj)

    bool contains(std::size_t k, std::size_t traj) const {
        return k >= 1 && k <= n_modes && traj >= first_traj && traj < first_traj + n_traj;
    }

    const FbmPath& path(std::size_t k, std::size_t traj) const {
        if (!contains(k, traj))
            throw Error("fbm", "ensemble has no path for mode " + std::to_string(k) + ", trajectory " +
                                   std::to_string(traj));
        return paths[(k - 1) * n_traj + (traj - first_traj)];
    }

    StreamId stream(std::size_t k, std::size_t traj) const { return StreamId{master_seed, k, traj}; }
};

enum class SamplerKind { Circulant, Cholesky };

inline FbmEnsemble generate_ensemble(double h, double tau, std::size_t steps, std::size_t n_modes,
                                     std::size_t n_traj, std::uint64_t master_seed, std::size_t first_traj = 0,
                                     SamplerKind kind = SamplerKind::Circulant) {
    FbmEnsemble ens{h, tau, steps, n_modes, first_traj, n_traj, master_seed, {}};
    ens.paths.reserve(n_modes * n_traj);
    auto fill = [&](const auto& sampler) {
        for (std::size_t k = 1; k <= n_modes; ++k)
            for (std::size_t i = first_traj; i < first_traj + n_traj; ++i) {
                Engine rng = make_engine(ens.stream(k, i));
                ens.paths.push_back(sampler.sample(rng));
            }
    };
    if (kind == SamplerKind::Circulant)
        fill(CirculantSampler(h, tau, steps));
    else
        fill(CholeskySampler(h, tau, steps));
    return ens;
}

inline FbmEnsemble coarsen(const FbmEnsemble& fine, std::size_t factor) {
    FbmEnsemble out = fine;
    out.tau = fine.tau * static_cast<double>(factor);
    for (auto& p : out.paths) p = coarsen(p, factor);
    out.steps = out.paths.empty() ? fine.steps / factor : out.paths.front().size();
    return out;
}

inline constexpr char kEnsembleMagic[9] = "SFDEFBM1";

/// Header: H, tau (f64); L, N, n_traj, master seed, first trajectory (u64). Payload: f64 increments, mode-major.
inline void write_ensemble(std::ostream& os, const FbmEnsemble& ens) {
    binary::write_magic(os, kEnsembleMagic);
    binary::write_f64(os, ens.h);
    binary::write_f64(os, ens.tau);
    binary::write_u64(os, ens.steps);
    binary::write_u64(os, ens.n_modes);
    binary::write_u64(os, ens.n_traj);
    binary::write_u64(os, ens.master_seed);
    binary::write_u64(os, ens.first_traj);
    for (const auto& p : ens.paths)
        for (double d : p.increments) binary::write_f64(os, d);
    if (!os) throw Error("fbm", "failed writing ensemble");
}

inline FbmEnsemble read_ensemble(std::istream& is) {
    binary::expect_magic(is, kEnsembleMagic);
    FbmEnsemble ens;
    ens.h = binary::read_f64(is);
    ens.tau = binary::read_f64(is);
    ens.steps = binary::read_u64(is);
    ens.n_modes = binary::read_u64(is);
    ens.n_traj = binary::read_u64(is);
    ens.master_seed = binary::read_u64(is);
    ens.first_traj = binary::read_u64(is);
    ens.paths.assign(ens.n_modes * ens.n_traj, FbmPath{ens.h, ens.tau, std::vector<double>(ens.steps)});
    for (auto& p : ens.paths)
        for (double& d : p.increments) d = binary::read_f64(is);
    return ens;
}

} // namespace sfde::fbm
