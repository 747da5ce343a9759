#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "sfde/error.hpp"

// Dirichlet Laplacian on (0,1): eigenpairs, sine-basis projection and the
// spectral fractional Laplacian.
namespace sfde::spectral {

using std::numbers::pi;

/// lambda_k = (k pi)^2.
inline double eigenvalue(long k) {
    if (k < 1) throw DomainError("spectral", "mode index must be >= 1, got " + std::to_string(k));
    const double w = static_cast<double>(k) * pi;
    return w * w;
}

/// lambda_k^s for k = 1..n_modes, the diagonal of A^s restricted to the first n_modes.
inline Eigen::VectorXd fractional_symbol(std::size_t n_modes, double s) {
    if (!(s > 0.0 && s <= 1.0))
        throw DomainError("spectral", "fractional order s must lie in (0,1], got " + std::to_string(s));
    Eigen::VectorXd out(static_cast<Eigen::Index>(n_modes));
    for (std::size_t k = 1; k <= n_modes; ++k)
        out[static_cast<Eigen::Index>(k - 1)] = std::pow(static_cast<double>(k) * pi, 2.0 * s);
    return out;
}

/// sqrt(2) sin(k pi x).
inline double eigenfunction_at(long k, double x) {
    if (k < 1) throw DomainError("spectral", "mode index must be >= 1, got " + std::to_string(k));
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("spectral", "point must lie in [0,1], got " + std::to_string(x));
    return std::numbers::sqrt2 * std::sin(static_cast<double>(k) * pi * x);
}

/// Coefficients of a function in the orthonormal sine basis; coeffs[k-1] multiplies phi_k.
struct SpectralField {
    Eigen::VectorXd coeffs;

    SpectralField() = default;
    explicit SpectralField(Eigen::VectorXd c) : coeffs(std::move(c)) {}

    static SpectralField zeros(std::size_t n) {
        return SpectralField(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    }

    std::size_t n_modes() const { return static_cast<std::size_t>(coeffs.size()); }
    bool all_finite() const { return coeffs.allFinite(); }

    /// Coefficient of phi_k (1-based).
    double operator[](std::size_t k) const { return coeffs[static_cast<Eigen::Index>(k - 1)]; }
    double& operator[](std::size_t k) { return coeffs[static_cast<Eigen::Index>(k - 1)]; }
};

/// Uniform interior grid x_j = j/(M+1), j = 1..M, with the sine-transform
/// quadrature weight 1/(M+1). The trapezoid rule reduces to this because the
/// boundary values vanish.
class GridSpec {
public:
    explicit GridSpec(std::size_t n_points) : n_points_(n_points) {
        if (n_points < 1) throw DomainError("spectral", "grid needs at least one interior node");
    }

    /// Smallest grid satisfying the anti-aliasing rule M >= 2N.
    static GridSpec for_modes(std::size_t n_modes) { return GridSpec(2 * n_modes); }

    std::size_t n_points() const { return n_points_; }
    double weight() const { return 1.0 / static_cast<double>(n_points_ + 1); }

    /// Node x_j for j = 1..M.
    double node(std::size_t j) const { return static_cast<double>(j) * weight(); }

    Eigen::VectorXd nodes() const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(n_points_));
        for (std::size_t j = 1; j <= n_points_; ++j) x[static_cast<Eigen::Index>(j - 1)] = node(j);
        return x;
    }

    /// Largest mode count that project() accepts on this grid.
    std::size_t max_projected_modes() const { return n_points_ / 2; }

    bool operator==(const GridSpec&) const = default;

private:
    std::size_t n_points_;
};

struct Eigenpair {
    long k;
    double lambda;
    Eigen::VectorXd values; ///< phi_k at the grid nodes
};

inline Eigenpair eigenpair(long k, const GridSpec& grid) {
    Eigenpair e{k, eigenvalue(k), Eigen::VectorXd(static_cast<Eigen::Index>(grid.n_points()))};
    for (std::size_t j = 1; j <= grid.n_points(); ++j)
        e.values[static_cast<Eigen::Index>(j - 1)] = eigenfunction_at(k, grid.node(j));
    return e;
}

/// Tabulated phi_k(x_j) for k <= N. project and synthesize are dense
/// matrix-vector products against this table, exactly inverse on span{phi_1..phi_N}.
class SpectralBasis {
public:
    SpectralBasis(std::size_t n_modes, GridSpec grid) : grid_(grid), n_modes_(n_modes) {
        if (n_modes > grid.n_points())
            throw DomainError("spectral", "grid with " + std::to_string(grid.n_points()) +
                                              " nodes cannot resolve " + std::to_string(n_modes) + " modes");
        const auto M = static_cast<Eigen::Index>(grid.n_points());
        const auto N = static_cast<Eigen::Index>(n_modes);
        table_.resize(M, N);
        for (Eigen::Index j = 0; j < M; ++j) {
            const double x = grid.node(static_cast<std::size_t>(j + 1));
            for (Eigen::Index k = 0; k < N; ++k)
                table_(j, k) = std::numbers::sqrt2 * std::sin(static_cast<double>(k + 1) * pi * x);
        }
    }

    const GridSpec& grid() const { return grid_; }
    std::size_t n_modes() const { return n_modes_; }
    const Eigen::MatrixXd& table() const { return table_; }

    SpectralField project(const Eigen::Ref<const Eigen::VectorXd>& grid_values) const {
        check_projection();
        check_grid_size(grid_values.size());
        return SpectralField(grid_.weight() * (table_.transpose() * grid_values));
    }

    Eigen::VectorXd synthesize(const SpectralField& field) const {
        if (field.n_modes() != n_modes_)
            throw Error("spectral", "field has " + std::to_string(field.n_modes()) + " modes, basis has " +
                                        std::to_string(n_modes_));
        return table_ * field.coeffs;
    }

private:
    void check_projection() const {
        if (n_modes_ > grid_.max_projected_modes())
            throw DomainError("spectral", "aliasing: projecting " + std::to_string(n_modes_) + " modes needs at least " +
                                              std::to_string(2 * n_modes_) + " nodes, grid has " +
                                              std::to_string(grid_.n_points()));
    }

    void check_grid_size(Eigen::Index n) const {
        if (static_cast<std::size_t>(n) != grid_.n_points())
            throw Error("spectral", "expected " + std::to_string(grid_.n_points()) + " grid values, got " +
                                        std::to_string(n));
    }

    GridSpec grid_;
    std::size_t n_modes_;
    Eigen::MatrixXd table_;
};

/// (u, phi_k) for k = 1..N by the grid quadrature.
inline SpectralField project(const Eigen::Ref<const Eigen::VectorXd>& grid_values, const GridSpec& grid,
                             std::size_t n_modes) {
    if (n_modes > grid.max_projected_modes())
        throw DomainError("spectral", "aliasing: N = " + std::to_string(n_modes) + " exceeds M/2 = " +
                                          std::to_string(grid.max_projected_modes()));
    return SpectralBasis(n_modes, grid).project(grid_values);
}

/// sum_k coeffs[k] phi_k(x_j) at every node.
inline Eigen::VectorXd synthesize(const SpectralField& field, const GridSpec& grid) {
    return SpectralBasis(field.n_modes(), grid).synthesize(field);
}

inline SpectralField apply_fractional_laplacian(const SpectralField& field, double s) {
    return SpectralField(fractional_symbol(field.n_modes(), s).cwiseProduct(field.coeffs));
}

/// L2(0,1) norm of the synthesized function, by Parseval.
inline double l2_norm(const SpectralField& field) { return field.coeffs.norm(); }

} // namespace sfde::spectral
