#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "sfde/binary_io.hpp"
#include "sfde/cq.hpp"
#include "sfde/error.hpp"
#include "sfde/fbm.hpp"
#include "sfde/spectral.hpp"

// Fully discrete scheme: backward-Euler convolution quadrature in time,
// spectral Galerkin in space, explicit nonlinearity, fBm-driven forcing.
namespace sfde::solver {

using spectral::SpectralField;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Right-hand side f. Pointwise kinds act on grid values and are projected back;
/// the modal kind adds a fixed coefficient vector directly.
class Nonlinearity {
public:
    enum class Kind { Zero, Sin, Pointwise, Modal };

    static Nonlinearity zero() { return Nonlinearity(Kind::Zero, "zero"); }
    static Nonlinearity sine() { return Nonlinearity(Kind::Sin, "sin"); }

    static Nonlinearity pointwise(std::function<double(double)> fn, std::string name = "user") {
        Nonlinearity n(Kind::Pointwise, std::move(name));
        n.fn_ = std::move(fn);
        return n;
    }

    static Nonlinearity modal(Eigen::VectorXd forcing) {
        Nonlinearity n(Kind::Modal, "modal");
        n.modal_ = std::move(forcing);
        return n;
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool acts_on_grid() const { return kind_ == Kind::Sin || kind_ == Kind::Pointwise; }
    const Eigen::VectorXd& modal_forcing() const { return modal_; }

    double operator()(double u) const {
        switch (kind_) {
        case Kind::Sin: return std::sin(u);
        case Kind::Pointwise: return fn_(u);
        default: return 0.0;
        }
    }

private:
    Nonlinearity(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
    std::function<double(double)> fn_;
    Eigen::VectorXd modal_;
};

struct ModelParams {
    double alpha = 0.5;  ///< time-fractional order
    double s = 0.5;      ///< space-fractional order
    double h = 0.5;      ///< Hurst index
    double m = 0.0;      ///< noise spectrum Lambda_k = k^m
    double t_final = 0.01;
    Nonlinearity f = Nonlinearity::sine();
    double noise_scale = 1.0; ///< multiplies the noise term; 0 gives the deterministic problem

    void validate() const {
        auto open_unit = [](const char* name, double v) {
            if (!(v > 0.0 && v < 1.0))
                throw DomainError("solver", std::string(name) + " must lie in (0,1), got " + std::to_string(v));
        };
        open_unit("alpha", alpha);
        open_unit("s", s);
        open_unit("hurst", h);
        if (!std::isfinite(m)) throw DomainError("solver", "m must be finite");
        if (!(t_final > 0.0)) throw DomainError("solver", "t_final must be positive");
        if (!std::isfinite(noise_scale)) throw DomainError("solver", "noise_scale must be finite");
    }
};

struct Discretization {
    std::size_t n_modes = 1;
    std::size_t n_steps = 1;
    double tau = 1.0;
    spectral::GridSpec grid{2};

    static Discretization make(double t_final, std::size_t n_modes, std::size_t n_steps) {
        if (n_modes < 1 || n_steps < 1) throw DomainError("solver", "need N >= 1 and L >= 1");
        if (!(t_final > 0.0)) throw DomainError("solver", "t_final must be positive");
        return Discretization{n_modes, n_steps, t_final / static_cast<double>(n_steps),
                              spectral::GridSpec::for_modes(n_modes)};
    }
};

/// Which noise realization drove a trajectory.
struct NoiseId {
    std::uint64_t master_seed = 0;
    std::size_t trajectory = 0;

    bool operator==(const NoiseId&) const = default;
};

struct Trajectory {
    ModelParams params;
    Discretization disc;
    NoiseId noise_id;
    Eigen::VectorXd symbol; ///< diagonal of A^s_N, lambda_k^s
    RowMatrix states;       ///< row n holds u^n; row 0 is the zero initial state

    SpectralField state(std::size_t n) const { return SpectralField(states.row(static_cast<Eigen::Index>(n)).transpose()); }
    SpectralField final_state() const { return state(disc.n_steps); }
    double final_time() const { return disc.tau * static_cast<double>(disc.n_steps); }
};

inline Trajectory make_trajectory(const ModelParams& params, const Discretization& disc, NoiseId noise_id = {}) {
    params.validate();
    Trajectory t{params, disc, noise_id, spectral::fractional_symbol(disc.n_modes, params.s),
                 RowMatrix::Zero(static_cast<Eigen::Index>(disc.n_steps + 1), static_cast<Eigen::Index>(disc.n_modes))};
    return t;
}

/// Coefficients sqrt(k^m) (W_k(t_n) - W_k(t_{n-1})) / tau for k = 1..N.
inline SpectralField noise_increment_field(const fbm::FbmEnsemble& ens, std::size_t traj, std::size_t n, double m,
                                           std::size_t n_modes) {
    if (n < 1 || n > ens.steps)
        throw Error("solver", "time level " + std::to_string(n) + " outside 1.." + std::to_string(ens.steps));
    SpectralField out = SpectralField::zeros(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k) {
        const double amp = std::sqrt(std::pow(static_cast<double>(k), m));
        out[k] = amp * ens.path(k, traj).increments[n - 1] / ens.tau;
    }
    return out;
}

/// P_N f(u) for a fixed mode count.
class ForcingEvaluator {
public:
    ForcingEvaluator(const Nonlinearity& f, std::size_t n_modes, const spectral::GridSpec& grid)
        : f_(f), n_modes_(n_modes) {
        if (f.acts_on_grid()) basis_.emplace(n_modes, grid);
        if (f.kind() == Nonlinearity::Kind::Modal && static_cast<std::size_t>(f.modal_forcing().size()) < n_modes)
            throw Error("solver", "modal forcing has fewer entries than modes");
    }

    SpectralField operator()(const SpectralField& u) const {
        switch (f_.kind()) {
        case Nonlinearity::Kind::Zero: return SpectralField::zeros(n_modes_);
        case Nonlinearity::Kind::Modal:
            return SpectralField(f_.modal_forcing().head(static_cast<Eigen::Index>(n_modes_)));
        default: {
            Eigen::VectorXd values = basis_->synthesize(u);
            for (auto& v : values) v = f_(v);
            return basis_->project(values);
        }
        }
    }

private:
    Nonlinearity f_;
    std::size_t n_modes_;
    std::optional<spectral::SpectralBasis> basis_;
};

namespace detail {

inline const double* level_row(const Trajectory& traj, std::size_t n) {
    return traj.states.data() + static_cast<Eigen::Index>(n) * traj.states.cols();
}

/// Solves for u^n mode by mode and stores it in traj.states.
inline SpectralField advance(Trajectory& traj, std::size_t n, const cq::CqWeightTable& w, const SpectralField& forcing,
                             const SpectralField& noise) {
    const auto N = static_cast<Eigen::Index>(traj.disc.n_modes);
    const double inv_tau = 1.0 / traj.disc.tau;

    Eigen::VectorXd history = Eigen::VectorXd::Zero(N);
    for (std::size_t i = 1; i < n; ++i)
        history += w.weights[i] * Eigen::Map<const Eigen::VectorXd>(level_row(traj, n - i), N);

    const Eigen::VectorXd prev = Eigen::Map<const Eigen::VectorXd>(level_row(traj, n - 1), N);
    const Eigen::ArrayXd rhs = inv_tau * prev.array() - traj.symbol.array() * history.array() +
                               forcing.coeffs.array() + noise.coeffs.array();
    const Eigen::ArrayXd lhs = inv_tau + w.weights[0] * traj.symbol.array();
    const Eigen::VectorXd next = (rhs / lhs).matrix();

    for (Eigen::Index k = 0; k < N; ++k)
        if (!std::isfinite(next[k]))
            throw Error("solver", "non-finite value in mode " + std::to_string(k + 1) + " at level " +
                                      std::to_string(n));
    traj.states.row(static_cast<Eigen::Index>(n)) = next.transpose();
    return SpectralField(next);
}

inline void check_step(const Trajectory& traj, std::size_t n, const cq::CqWeightTable& w, const SpectralField& noise) {
    if (n < 1 || n > traj.disc.n_steps)
        throw Error("solver", "target level " + std::to_string(n) + " outside 1.." + std::to_string(traj.disc.n_steps));
    if (w.size() < n) throw Error("solver", "CQ weight table shorter than target level");
    if (std::abs(w.order - (1.0 - traj.params.alpha)) > 1e-14 || std::abs(w.tau - traj.disc.tau) > 1e-14 * w.tau)
        throw Error("solver", "CQ weights were built for a different order or step");
    if (noise.n_modes() != traj.disc.n_modes) throw Error("solver", "noise field has wrong mode count");
}

} // namespace detail

/// Advances a trajectory one level at a time, reusing the CQ weights and the spectral basis.
class Stepper {
public:
    explicit Stepper(const Trajectory& traj)
        : weights_(cq::cq_weights(1.0 - traj.params.alpha, traj.disc.tau, traj.disc.n_steps)),
          forcing_(traj.params.f, traj.disc.n_modes, traj.disc.grid) {}

    const cq::CqWeightTable& weights() const { return weights_; }

    SpectralField advance(Trajectory& traj, std::size_t n, const SpectralField& noise) const {
        detail::check_step(traj, n, weights_, noise);
        return detail::advance(traj, n, weights_, forcing_(traj.state(n - 1)), noise);
    }

private:
    cq::CqWeightTable weights_;
    ForcingEvaluator forcing_;
};

/// One step of the scheme:
///   (1/tau + d_0 lambda_k^s) u_k^n = u_k^{n-1}/tau - lambda_k^s sum_{i=1}^{n-1} d_i u_k^{n-i}
///                                    + (P_N f(u^{n-1}))_k + noise_k.
/// Writes u^n into traj.states and returns it.
inline SpectralField step(Trajectory& traj, std::size_t n, const cq::CqWeightTable& weights, const SpectralField& noise) {
    detail::check_step(traj, n, weights, noise);
    const ForcingEvaluator forcing(traj.params.f, traj.disc.n_modes, traj.disc.grid);
    return detail::advance(traj, n, weights, forcing(traj.state(n - 1)), noise);
}

inline Trajectory run_trajectory(const ModelParams& params, const Discretization& disc, const fbm::FbmEnsemble& ens,
                                 std::size_t traj_index) {
    if (ens.h != params.h) throw Error("solver", "ensemble Hurst index does not match the model");
    if (ens.steps != disc.n_steps || std::abs(ens.tau - disc.tau) > 1e-12 * disc.tau)
        throw Error("solver", "ensemble time grid (L = " + std::to_string(ens.steps) +
                                  ") does not match the discretization (L = " + std::to_string(disc.n_steps) + ")");
    if (ens.n_modes < disc.n_modes)
        throw Error("solver", "ensemble has " + std::to_string(ens.n_modes) + " modes, need " +
                                  std::to_string(disc.n_modes));
    Trajectory traj = make_trajectory(params, disc, NoiseId{ens.master_seed, traj_index});
    const Stepper stepper(traj);
    for (std::size_t n = 1; n <= disc.n_steps; ++n) {
        auto noise = noise_increment_field(ens, traj_index, n, params.m, disc.n_modes);
        noise.coeffs *= params.noise_scale;
        stepper.advance(traj, n, noise);
    }
    return traj;
}

inline constexpr char kTrajectoryMagic[9] = "SFDETRJ1";

/// Header: alpha, s, H, m, T, tau (f64); N, L, master seed, trajectory (u64).
/// Payload: (L+1) x N f64 coefficients, level-major.
inline void write_trajectory(std::ostream& os, const Trajectory& t) {
    binary::write_magic(os, kTrajectoryMagic);
    for (double v : {t.params.alpha, t.params.s, t.params.h, t.params.m, t.params.t_final, t.disc.tau})
        binary::write_f64(os, v);
    binary::write_u64(os, t.disc.n_modes);
    binary::write_u64(os, t.disc.n_steps);
    binary::write_u64(os, t.noise_id.master_seed);
    binary::write_u64(os, t.noise_id.trajectory);
    for (Eigen::Index n = 0; n < t.states.rows(); ++n)
        for (Eigen::Index k = 0; k < t.states.cols(); ++k) binary::write_f64(os, t.states(n, k));
    if (!os) throw Error("solver", "failed writing trajectory");
}

/// Reads a dump back; the nonlinearity is not stored and is left at its default.
inline Trajectory read_trajectory(std::istream& is) {
    binary::expect_magic(is, kTrajectoryMagic);
    ModelParams p;
    p.alpha = binary::read_f64(is);
    p.s = binary::read_f64(is);
    p.h = binary::read_f64(is);
    p.m = binary::read_f64(is);
    p.t_final = binary::read_f64(is);
    const double tau = binary::read_f64(is);
    const auto N = binary::read_u64(is);
    const auto L = binary::read_u64(is);
    NoiseId id{binary::read_u64(is), static_cast<std::size_t>(binary::read_u64(is))};
    Discretization disc = Discretization::make(p.t_final, N, L);
    disc.tau = tau;
    Trajectory t = make_trajectory(p, disc, id);
    for (Eigen::Index n = 0; n < t.states.rows(); ++n)
        for (Eigen::Index k = 0; k < t.states.cols(); ++k) t.states(n, k) = binary::read_f64(is);
    return t;
}

} // namespace sfde::solver
