#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gosset/errors.hpp"
#include "gosset/greeks.hpp"
#include "oracles.hpp"

using namespace gosset;

namespace {

ReturnDistribution t(double nu) { return ReturnDistribution::student_t(nu); }

TailPolicy make(const ReturnDistribution& d, TailMode mode, double p_cap, double p_floor = 0.0) {
    return TailPolicy::from_probabilities(d, mode, p_floor, p_cap);
}

double c0(const ReturnDistribution& d, const TailPolicy& pol, double s, double sigma, double k = 49.0,
          double rt = 0.03) {
    QuadratureConfig fine;
    fine.rel_tol = 1e-13;
    fine.abs_tol = 1e-15;
    fine.max_subdivisions = 2000;
    return price_call(d, pol, MarketParams{s, k, rt, sigma}, fine).value_at_zero;
}

constexpr TailMode kModes[] = {TailMode::Capped, TailMode::Truncated};

}  // namespace

TEST(Greeks, BlackScholesLimit) {
    const auto n = ReturnDistribution::normal();
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    for (TailMode mode : kModes) {
        const auto pol = make(n, mode, 1.0 - 1e-12);
        EXPECT_NEAR(call_delta(n, pol, m), oracle::bs_delta(50.0, 49.0, 0.03, 0.3), 1e-6);
        EXPECT_NEAR(call_gamma(n, pol, m), oracle::bs_gamma(50.0, 49.0, 0.03, 0.3), 1e-6);
        EXPECT_NEAR(call_vega(n, pol, m), oracle::bs_vega(50.0, 49.0, 0.03, 0.3), 1e-6);
    }
    const auto bs = black_scholes_call_greeks(m);
    EXPECT_NEAR(bs.delta, oracle::bs_delta(50.0, 49.0, 0.03, 0.3), 1e-12);
    EXPECT_NEAR(bs.gamma, oracle::bs_gamma(50.0, 49.0, 0.03, 0.3), 1e-12);
    EXPECT_NEAR(bs.vega, oracle::bs_vega(50.0, 49.0, 0.03, 0.3), 1e-10);
}

TEST(Greeks, ZeroStrikeLimits) {
    const auto d = t(3.0);
    const MarketParams m{50.0, 0.0, 0.03, 0.3};
    const auto tr = make(d, TailMode::Truncated, 0.999);
    EXPECT_NEAR(delta_truncated(d, tr, m), 1.0, 1e-12);
    EXPECT_EQ(gamma_truncated(d, tr, m), 0.0);
    EXPECT_NEAR(vega_truncated(d, tr, m), 0.0, 1e-10);
    const auto cap = make(d, TailMode::Capped, 0.999);
    EXPECT_NEAR(delta_capped(d, cap, m), 1.0, 1e-12);
    EXPECT_EQ(gamma_capped(d, cap, m), 0.0);
    const auto bs = black_scholes_call_greeks(m);
    EXPECT_EQ(bs.delta, 1.0);
    EXPECT_EQ(bs.gamma, 0.0);
    EXPECT_EQ(bs.vega, 0.0);
}

TEST(Greeks, ModeMismatchRejected) {
    const auto d = t(3.0);
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    EXPECT_THROW(delta_truncated(d, make(d, TailMode::Capped, 0.999), m), ValidationError);
    EXPECT_THROW(vega_capped(d, make(d, TailMode::Truncated, 0.999), m), ValidationError);
}

TEST(Greeks, FiniteDifferenceOracleAcrossSpot) {
    // Spot grid at K = 49 across cap levels and volatilities.
    for (TailMode mode : kModes) {
        for (double p_cap : {0.99, 0.999, 0.9999}) {
            for (double sigma : {0.1, 0.2, 0.3}) {
                const auto d = t(3.0);
                const auto pol = make(d, mode, p_cap);
                for (double s : {30.0, 45.0, 49.0, 55.0, 70.0}) {
                    const MarketParams m{s, 49.0, 0.03, sigma};
                    const double hd = 1e-5 * s;
                    const double fd_delta = (c0(d, pol, s + hd, sigma) - c0(d, pol, s - hd, sigma)) / (2.0 * hd);
                    const double h = 1e-3 * s;
                    const double fd_gamma =
                        (c0(d, pol, s + h, sigma) - 2.0 * c0(d, pol, s, sigma) + c0(d, pol, s - h, sigma)) / (h * h);
                    const double hv = 1e-5 * sigma;
                    const double fd_vega = (c0(d, pol, s, sigma + hv) - c0(d, pol, s, sigma - hv)) / (2.0 * hv);
                    EXPECT_NEAR(call_delta(d, pol, m), fd_delta, 1e-6 * std::abs(fd_delta) + 1e-12);
                    EXPECT_NEAR(call_gamma(d, pol, m), fd_gamma, 1e-4 * std::abs(fd_gamma) + 1e-10);
                    EXPECT_NEAR(call_vega(d, pol, m), fd_vega, 1e-4 * std::abs(fd_vega) + 1e-10);
                }
            }
        }
    }
}

TEST(Greeks, SignsAndDeltaBounds) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> s_u(20.0, 90.0), nu_u(2.2, 40.0);
    for (int i = 0; i < 40; ++i) {
        const auto d = t(nu_u(rng));
        const MarketParams m{s_u(rng), 49.0, 0.03, 0.3};
        for (TailMode mode : kModes) {
            const auto pol = make(d, mode, 0.999);
            const double delta = call_delta(d, pol, m);
            EXPECT_GE(delta, 0.0);
            EXPECT_LE(delta, 1.0 + 1e-12);
            EXPECT_GE(call_gamma(d, pol, m), 0.0);
            EXPECT_GE(call_vega(d, pol, m), 0.0);
        }
    }
}

TEST(Greeks, VegaAndThetaIncreaseAsNuFalls) {
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    double prev_vega = black_scholes_call_greeks(m).vega;
    double prev_theta =
        oracle::bs_call(50.0, 49.0, 0.03 * 366.0 / 365.0, 0.3 * std::sqrt(366.0 / 365.0)) - oracle::bs_call(50.0, 49.0, 0.03, 0.3);
    for (double nu : {40.0, 21.0, 8.0, 3.0}) {
        const auto d = t(nu);
        const auto pol = make(d, TailMode::Truncated, 0.999);
        const double vega = call_vega(d, pol, m);
        const double theta = theta_numeric(d, pol, m);
        EXPECT_GT(vega, prev_vega) << nu;
        EXPECT_GT(theta, prev_theta) << nu;
        prev_vega = vega;
        prev_theta = theta;
    }
}

TEST(Theta, ExactOneDayRecipe) {
    const auto d = t(8.0);
    const auto pol = make(d, TailMode::Capped, 0.999);
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    const double bumped =
        price_call(d, pol, MarketParams{50.0, 49.0, 0.03 * 366.0 / 365.0, 0.3 * std::sqrt(366.0 / 365.0)}).value_at_zero;
    EXPECT_DOUBLE_EQ(theta_numeric(d, pol, m), bumped - price_call(d, pol, m).value_at_zero);
    // Deep out of the money at tiny volatility both prices vanish.
    EXPECT_NEAR(theta_numeric(d, pol, MarketParams{50.0, 80.0, 0.03, 1e-3}), 0.0, 1e-12);
}

TEST(PriceDerivatives, NuAndCapProbability) {
    const auto d = t(3.0);
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    for (TailMode mode : kModes) {
        const auto pol = make(d, mode, 0.999);
        const double h = 1e-4;
        const double up = price_call(t(3.0 + h), make(t(3.0 + h), mode, 0.999), m).value_at_zero;
        const double dn = price_call(t(3.0 - h), make(t(3.0 - h), mode, 0.999), m).value_at_zero;
        EXPECT_NEAR(dprice_dnu(d, pol, m), (up - dn) / (2.0 * h), 1e-4 * std::abs(up - dn) / (2.0 * h));
        EXPECT_LT(dprice_dnu(d, pol, m), 0.0);

        const double hp = 1e-6;
        const double pu = price_call(d, make(d, mode, 0.999 + hp), m).value_at_zero;
        const double pd = price_call(d, make(d, mode, 0.999 - hp), m).value_at_zero;
        const double ref = (pu - pd) / (2.0 * hp);
        EXPECT_NEAR(dprice_dp(d, pol, m, FdConfig{std::nullopt, FdScheme::Central}), ref, 1e-3 * std::abs(ref));
    }
    // Capped call gains from a higher cap; so does the truncated one (fatter retained tail).
    EXPECT_GT(dprice_dp(d, make(d, TailMode::Capped, 0.999), m), 0.0);
    EXPECT_THROW(dprice_dnu(ReturnDistribution::normal(), make(ReturnDistribution::normal(), TailMode::Truncated, 0.999), m),
                 ValidationError);
    EXPECT_THROW(dprice_dp(d, make(d, TailMode::Capped, 0.999), m, FdConfig{0.01, FdScheme::Forward}),
                 ValidationError);
}

TEST(PriceDerivatives, NuSensitivityVanishesForLargeNu) {
    const auto d = t(1e5);
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    EXPECT_NEAR(dprice_dnu(d, make(d, TailMode::Truncated, 0.999), m), 0.0, 1e-7);
}

TEST(ComputeGreeks, ReportFieldsAndNormalKernel) {
    const auto d = t(3.0);
    const MarketParams m{50.0, 49.0, 0.03, 0.3};
    const auto pol = make(d, TailMode::Capped, 0.999);
    const auto g = compute_greeks(d, pol, m);
    EXPECT_DOUBLE_EQ(g.delta, call_delta(d, pol, m));
    EXPECT_DOUBLE_EQ(g.gamma, call_gamma(d, pol, m));
    EXPECT_DOUBLE_EQ(g.vega, call_vega(d, pol, m));
    EXPECT_DOUBLE_EQ(g.theta, theta_numeric(d, pol, m));

    const auto n = ReturnDistribution::normal();
    const auto full = compute_greeks(n, make(n, TailMode::Truncated, 1.0), m);
    EXPECT_EQ(full.dC_dnu, 0.0);
    EXPECT_TRUE(std::isnan(full.dC_dp));
    EXPECT_NEAR(full.delta, oracle::bs_delta(50.0, 49.0, 0.03, 0.3), 1e-6);
}

TEST(FiniteDifference, Schemes) {
    const auto f = [](double x) { return x * x * x; };
    EXPECT_NEAR(finite_difference(f, 2.0, 1e-4, FdScheme::Central), 12.0, 1e-7);
    EXPECT_NEAR(finite_difference(f, 2.0, 1e-6, FdScheme::Forward), 12.0, 1e-4);
    EXPECT_THROW(finite_difference(f, 2.0, 0.0, FdScheme::Central), ValidationError);
}
