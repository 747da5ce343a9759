#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sfde/cq.hpp"

using namespace sfde::cq;

TEST(CqWeights, LeadingCoefficients) {
    for (double a : {0.2, 0.5, 0.9})
        for (double tau : {1.0, 0.1, 1.0 / 2048}) {
            const auto w = cq_weights(a, tau, 4);
            EXPECT_NEAR(w[0], std::pow(tau, -a), 1e-14 * w[0]);
            EXPECT_NEAR(w[1], -a * std::pow(tau, -a), 1e-14 * w[0]);
        }
}

TEST(CqWeights, MatchPowerSeriesOracle) {
    const auto w = cq_weights(0.7, 1.0, 16);
    const auto ref = oracle::binomial_power_series(0.7L, 16);
    for (std::size_t j = 0; j < 16; ++j)
        EXPECT_NEAR(w[j], static_cast<double>(ref[j]), 1e-13 * std::abs(static_cast<double>(ref[j]))) << j;
}

TEST(CqWeights, MatchGammaClosedForm) {
    for (double a : {0.05, 0.3, 0.5, 0.77, 0.95}) {
        const auto w = cq_weights(a, 1.0, 65);
        for (std::size_t j = 0; j < 65; ++j) {
            const auto ref = static_cast<double>(oracle::binomial_gamma_form(a, j));
            EXPECT_NEAR(w[j], ref, 1e-13 * std::abs(ref)) << "a=" << a << " j=" << j;
        }
    }
}

TEST(CqWeights, MatchFftOfGeneratingFunction) {
    const auto w = cq_weights(0.4, 1.0, 32);
    const auto ref = oracle::binomial_fft(0.4, 32);
    for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(w[j], ref[j], 1e-7) << j;
}

TEST(CqWeights, SignPattern) {
    for (double a : {0.1, 0.5, 0.9}) {
        const auto w = cq_weights(a, 0.5, 200);
        EXPECT_GT(w[0], 0.0);
        for (std::size_t j = 1; j < 200; ++j) EXPECT_LT(w[j], 0.0) << j;
    }
}

TEST(CqWeights, PartialSumsTendToZero) {
    // (1 - zeta)^a vanishes at zeta = 1, so sum_j tau^a d_j -> 0
    const auto w = cq_weights(0.5, 1.0, 1000000);
    double partial = 0.0, previous = 2.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        partial += w[j];
        if (j % 100000 == 99999) {
            EXPECT_GT(partial, 0.0);
            EXPECT_LT(partial, previous);
            previous = partial;
        }
    }
    EXPECT_LT(partial, 1e-3);
}

TEST(CqWeights, ScalingInTau) {
    const auto unit = cq_weights(0.35, 1.0, 50);
    const double tau = 0.003;
    const auto scaled = cq_weights(0.35, tau, 50);
    for (std::size_t j = 0; j < 50; ++j)
        EXPECT_NEAR(scaled[j], std::pow(tau, -0.35) * unit[j], 1e-13 * std::abs(scaled[j]));
}

TEST(CqWeights, Errors) {
    EXPECT_THROW(cq_weights(0.0, 1.0, 4), sfde::DomainError);
    EXPECT_THROW(cq_weights(1.0, 1.0, 4), sfde::DomainError);
    EXPECT_THROW(cq_weights(0.5, 0.0, 4), sfde::DomainError);
    EXPECT_THROW(cq_weights(0.5, 1.0, 0), sfde::DomainError);
}

TEST(CqHistory, ConstantAndZeroHistories) {
    const auto w = cq_weights(0.6, 0.2, 10);
    const std::vector<double> ones(4, 1.0); // levels 0..3
    EXPECT_NEAR(apply_cq_history(w, ones), w[0] + w[1] + w[2], 1e-14);
    const std::vector<double> zeros(8, 0.0);
    EXPECT_EQ(apply_cq_history(w, zeros), 0.0);
}

TEST(CqHistory, MatchesDenseToeplitzProduct) {
    const std::size_t n = 20;
    const auto w = cq_weights(0.45, 0.05, n);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal;
    std::vector<double> hist(n + 1);
    for (auto& v : hist) v = normal(rng);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c <= r; ++c) T(r, c) = w[r - c];
    const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(hist.data() + 1, n);
    const Eigen::VectorXd dense = T * u;

    for (std::size_t level = 1; level <= n; ++level) {
        const std::span<const double> prefix(hist.data(), level + 1);
        EXPECT_NEAR(apply_cq_history(w, prefix), dense[level - 1], 1e-11);
    }
}

TEST(CqHistory, RejectsShortTable) {
    const auto w = cq_weights(0.5, 1.0, 3);
    const std::vector<double> hist(5, 1.0);
    EXPECT_THROW(apply_cq_history(w, hist), sfde::Error);
}

TEST(CqHistory, FirstOrderRiemannLiouvilleDerivative) {
    // D^a t = t^{1-a} / Gamma(2-a), evaluated at t = 1
    for (double a : {0.2, 0.5, 0.8}) {
        const double exact = 1.0 / std::tgamma(2.0 - a);
        std::vector<double> taus, errs;
        for (std::size_t L : {64u, 128u, 256u, 512u, 1024u}) {
            const double tau = 1.0 / L;
            const auto w = cq_weights(a, tau, L);
            std::vector<double> hist(L + 1);
            for (std::size_t j = 0; j <= L; ++j) hist[j] = j * tau;
            taus.push_back(tau);
            errs.push_back(std::abs(apply_cq_history(w, hist) - exact));
        }
        for (std::size_t i = 0; i + 1 < taus.size(); ++i)
            EXPECT_GE(std::log(errs[i] / errs[i + 1]) / std::log(2.0), 0.9) << "a=" << a;
    }
}
