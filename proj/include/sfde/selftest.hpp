#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sfde/cq.hpp"
#include "sfde/fbm.hpp"
#include "sfde/mlf.hpp"
#include "sfde/spectral.hpp"
#include "sfde/validation.hpp"

// Quick oracle suites run by `sfde selftest`.
namespace sfde::selftest {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline SuiteResult spectral_suite() {
    const std::size_t N = 16;
    const spectral::SpectralBasis basis(N, spectral::GridSpec::for_modes(N));
    const Eigen::MatrixXd gram = basis.grid().weight() * basis.table().transpose() * basis.table();
    const double dev = (gram - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
    return {"spectral orthonormality", dev < 1e-10, "max |G - I| = " + std::to_string(dev)};
}

inline SuiteResult fbm_suite() {
    std::ostringstream msg;
    bool ok = true;
    const std::size_t L = 16, paths = 20000;
    for (double h : {0.3, 0.8}) {
        fbm::Engine rng = fbm::make_engine({7, 0, static_cast<std::uint64_t>(h * 10)});
        const auto chol = validation::covariance_check(fbm::CholeskySampler(h, 0.1, L), h, 0.1, L, paths, rng);
        const auto circ = validation::covariance_check(fbm::CirculantSampler(h, 0.1, L), h, 0.1, L, paths, rng);
        ok = ok && chol.passed && circ.passed;
        msg << "H=" << h << " max z cholesky " << chol.max_z << ", circulant " << circ.max_z << "; ";
    }
    return {"fbm covariance", ok, msg.str()};
}

inline SuiteResult cq_suite() {
    double worst = 0.0;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto w = cq::cq_weights(a, 1.0, 65);
        const auto ref = validation::binomial_series_oracle(a, 65);
        for (std::size_t j = 0; j < 65; ++j)
            worst = std::max(worst, static_cast<double>(std::abs((w[j] - ref[j]) / ref[j])));
    }
    return {"cq weights", worst < 1e-13, "max relative deviation " + std::to_string(worst)};
}

inline SuiteResult mlf_suite() {
    double worst = 0.0;
    for (double z = -20.0; z <= 0.0; z += 0.25) {
        worst = std::max(worst, std::abs(mlf::mittag_leffler({1.0, 1.0}, z) - std::exp(z)));
        const double e12 = z == 0.0 ? 1.0 : std::expm1(z) / z;
        worst = std::max(worst, std::abs(mlf::mittag_leffler({1.0, 2.0}, z) - e12));
    }
    for (double x = 0.0; x <= 20.0; x += 0.5) {
        const double ref = std::exp(x * x) * std::erfc(x);
        worst = std::max(worst, std::abs(mlf::mittag_leffler({0.5, 1.0}, -x) - ref) / ref);
    }
    return {"mittag-leffler identities", worst < 1e-10, "max deviation " + std::to_string(worst)};
}

inline SuiteResult solver_order_suite() {
    const std::vector<std::size_t> steps{64, 128, 256, 512};
    std::vector<double> taus;
    for (auto L : steps) taus.push_back(1.0 / static_cast<double>(L));
    bool ok = true;
    std::ostringstream msg;
    for (double a : {0.3, 0.5, 0.7}) {
        const auto err = validation::scalar_relaxation_errors(a, 1.0, 1.0, 1.0, steps);
        const double order = validation::fitted_order(taus, err);
        ok = ok && order >= 0.85 && order <= 1.15;
        msg << "alpha=" << a << " order " << order << "; ";
    }
    return {"scalar solver order", ok, msg.str()};
}

} // namespace detail

inline std::vector<SuiteResult> run_all() {
    std::vector<std::function<SuiteResult()>> suites{detail::spectral_suite, detail::fbm_suite, detail::cq_suite,
                                                     detail::mlf_suite, detail::solver_order_suite};
    std::vector<SuiteResult> out;
    for (auto& s : suites) {
        try {
            out.push_back(s());
        } catch (const std::exception& e) {
            out.push_back({"(suite threw)", false, e.what()});
        }
    }
    return out;
}

} // namespace sfde::selftest
