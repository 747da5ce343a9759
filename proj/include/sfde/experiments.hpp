#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sfde/error.hpp"
#include "sfde/fbm.hpp"
#include "sfde/parallel.hpp"
#include "sfde/solver.hpp"

// Monte Carlo strong-convergence studies: pathwise errors between coupled
// refinements, root-mean-square estimators, empirical and predicted rates.
namespace sfde::experiments {

using solver::ModelParams;
using solver::Trajectory;

enum class Axis { Space, Time };

inline const char* to_string(Axis a) { return a == Axis::Space ? "space" : "time"; }

struct ExperimentConfig {
    ModelParams params;
    Axis axis = Axis::Time;
    std::vector<std::size_t> levels;  ///< N values (space) or L values (time), each double the previous
    std::size_t fixed_other = 100;    ///< L for the space axis, N for the time axis
    std::size_t n_traj = 100;
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;          ///< 0 = all cores

    void validate() const {
        params.validate();
        if (levels.empty()) throw DomainError("experiments", "levels must not be empty");
        if (levels.front() < 1) throw DomainError("experiments", "levels must be positive");
        for (std::size_t j = 1; j < levels.size(); ++j)
            if (levels[j] != 2 * levels[j - 1])
                throw DomainError("experiments", "levels must double at each refinement, got " +
                                                     std::to_string(levels[j - 1]) + " then " + std::to_string(levels[j]));
        if (fixed_other < 1) throw DomainError("experiments", "fixed_other must be positive");
        if (n_traj < 2) throw DomainError("experiments", "n_traj must be at least 2");
    }
};

struct RatePrediction {
    double rho = 0.0;
    double sigma = 0.0;
    double temporal_rate = 0.0;
    double spatial_rate = 0.0;
};

/// rho = max(0, (1+m) d/4), sigma = max(0, min(s - rho, s H/alpha - rho)),
/// temporal rate H - rho alpha/s, spatial rate 2 sigma/d.
inline RatePrediction predict_rates(const ModelParams& p, int dim = 1) {
    const double d = static_cast<double>(dim);
    RatePrediction r;
    r.rho = std::max(0.0, (1.0 + p.m) * d / 4.0);
    r.sigma = std::max(0.0, std::min(p.s - r.rho, p.s * p.h / p.alpha - r.rho));
    r.temporal_rate = p.h - r.rho * p.alpha / p.s;
    r.spatial_rate = 2.0 * r.sigma / d;
    return r;
}

struct ErrorRow {
    std::size_t level = 0;
    double error = 0.0;
    std::optional<double> rate; ///< log2(e_level / e_next), absent on the last row
};

struct ErrorTable {
    std::vector<ErrorRow> rows;
    double theoretical_rate = 0.0;
    Axis axis = Axis::Time;
    double alpha = 0.0, s = 0.0, h = 0.0, m = 0.0;

    /// Mean of the rates of the two finest adjacent pairs, log2(e_{K-3}/e_{K-1})/2;
    /// falls back to the single pair when only two rows exist.
    std::optional<double> observed_rate() const {
        std::vector<double> rates;
        for (const auto& r : rows)
            if (r.rate) rates.push_back(*r.rate);
        if (rates.empty()) return std::nullopt;
        if (rates.size() == 1) return rates.front();
        return 0.5 * (rates[rates.size() - 1] + rates[rates.size() - 2]);
    }
};

/// Pairwise (cascade) summation; the result does not depend on thread scheduling.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// L2(0,1) distance of two coefficient vectors, the shorter zero-padded.
inline double coefficient_distance(const spectral::SpectralField& a, const spectral::SpectralField& b) {
    const auto& lo = a.n_modes() <= b.n_modes() ? a.coeffs : b.coeffs;
    const auto& hi = a.n_modes() <= b.n_modes() ? b.coeffs : a.coeffs;
    return std::sqrt((hi.head(lo.size()) - lo).squaredNorm() + hi.tail(hi.size() - lo.size()).squaredNorm());
}

/// ||u_coarse(T) - u_fine(T)||_{L2}; both runs must end at the same T and share a noise realization.
inline double pathwise_error(const Trajectory& coarse, const Trajectory& fine) {
    const double tc = coarse.final_time();
    const double tf = fine.final_time();
    if (std::abs(tc - tf) > 1e-12 * std::max(std::abs(tc), std::abs(tf)))
        throw Error("experiments", "trajectories end at different times (" + std::to_string(tc) + " vs " +
                                       std::to_string(tf) + ")");
    if (!(coarse.noise_id == fine.noise_id))
        throw Error("experiments", "trajectories are driven by different noise realizations");
    return coefficient_distance(coarse.final_state(), fine.final_state());
}

namespace detail {

/// Squared pathwise errors of one trajectory for each adjacent level pair.
inline std::vector<double> trajectory_errors(const ExperimentConfig& cfg, std::size_t traj) {
    const auto& p = cfg.params;
    std::vector<std::size_t> resolutions = cfg.levels;
    resolutions.push_back(2 * cfg.levels.back());

    std::vector<double> out;
    std::optional<Trajectory> previous;
    if (cfg.axis == Axis::Time) {
        const std::size_t finest = resolutions.back();
        const std::size_t n_modes = cfg.fixed_other;
        const auto fine = fbm::generate_ensemble(p.h, p.t_final / static_cast<double>(finest), finest, n_modes, 1,
                                                 cfg.master_seed, traj);
        for (std::size_t steps : resolutions) {
            const auto ens = steps == finest ? fine : fbm::coarsen(fine, finest / steps);
            auto run = solver::run_trajectory(p, solver::Discretization::make(p.t_final, n_modes, steps), ens, traj);
            if (previous) out.push_back(std::pow(pathwise_error(*previous, run), 2));
            previous = std::move(run);
        }
    } else {
        const std::size_t steps = cfg.fixed_other;
        const auto ens = fbm::generate_ensemble(p.h, p.t_final / static_cast<double>(steps), steps,
                                                resolutions.back(), 1, cfg.master_seed, traj);
        for (std::size_t n_modes : resolutions) {
            auto run = solver::run_trajectory(p, solver::Discretization::make(p.t_final, n_modes, steps), ens, traj);
            if (previous) out.push_back(std::pow(pathwise_error(*previous, run), 2));
            previous = std::move(run);
        }
    }
    return out;
}

} // namespace detail

/// Error e_l = sqrt(mean_i ||u_l(omega_i) - u_{2l}(omega_i)||^2) for every configured level.
inline ErrorTable run_convergence_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t K = cfg.levels.size();
    std::vector<std::vector<double>> per_traj(cfg.n_traj);

    parallel_for(cfg.n_traj, cfg.threads, [&](std::size_t i) {
        try {
            per_traj[i] = detail::trajectory_errors(cfg, i);
        } catch (const std::exception& e) {
            throw Error("experiments", std::string("trajectory ") + std::to_string(i) + " failed (" +
                                           to_string(cfg.axis) + " levels " + std::to_string(cfg.levels.front()) +
                                           ".." + std::to_string(2 * cfg.levels.back()) + "): " + e.what());
        }
    });

    const auto pred = predict_rates(cfg.params);
    ErrorTable table;
    table.axis = cfg.axis;
    table.theoretical_rate = cfg.axis == Axis::Time ? pred.temporal_rate : pred.spatial_rate;
    table.alpha = cfg.params.alpha;
    table.s = cfg.params.s;
    table.h = cfg.params.h;
    table.m = cfg.params.m;

    std::vector<double> column(cfg.n_traj);
    for (std::size_t j = 0; j < K; ++j) {
        for (std::size_t i = 0; i < cfg.n_traj; ++i) column[i] = per_traj[i][j];
        table.rows.push_back({cfg.levels[j], std::sqrt(pairwise_sum(column) / static_cast<double>(cfg.n_traj)), {}});
    }
    for (std::size_t j = 0; j + 1 < K; ++j) {
        const double a = table.rows[j].error;
        const double b = table.rows[j + 1].error;
        if (a > 0.0 && b > 0.0) table.rows[j].rate = std::log2(a / b);
    }
    return table;
}

namespace detail {

inline std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace detail

/// CSV: level,error,observed_rate,theoretical_rate. A missing rate is an empty cell.
inline void emit_table(const ErrorTable& table, std::ostream& os) {
    os << "level,error,observed_rate,theoretical_rate\n";
    for (const auto& r : table.rows) {
        os << r.level << ',' << detail::format_g6(r.error) << ',';
        if (r.rate) os << detail::format_g6(*r.rate);
        os << ',' << detail::format_g6(table.theoretical_rate) << '\n';
    }
    if (!os) throw Error("experiments", "failed writing CSV table");
}

inline void emit_table(const ErrorTable& table, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("experiments", "cannot open " + path + " for writing");
    emit_table(table, os);
}

} // namespace sfde::experiments
