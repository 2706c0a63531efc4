#pragma once

#include <functional>
#include <optional>

#include "gosset/pricing.hpp"

namespace gosset {

enum class FdScheme { Forward, Central };

/// Finite-difference settings. An unset `step` picks a parameter-specific
/// default: relative 1e-5 of the bumped parameter, or 1e-3 * (1 - p_cap) for
/// the cap probability.
struct FdConfig {
    std::optional<double> step;
    FdScheme scheme = FdScheme::Central;
};

/// Call sensitivities under one tail policy.
struct GreeksReport {
    double delta = 0.0;
    double gamma = 0.0;     ///< per currency unit
    double vega = 0.0;      ///< per unit sigma_T
    double theta = 0.0;     ///< currency per day
    double dC_dnu = 0.0;    ///< per unit nu; 0 for the normal kernel
    double dC_dp = 0.0;     ///< per unit cap probability; NaN when the cap cannot move
};

double delta_truncated(const ReturnDistribution& dist, const TailPolicy& policy,
                       const MarketParams& mkt, const QuadratureConfig& cfg = {});
double delta_capped(const ReturnDistribution& dist, const TailPolicy& policy,
                    const MarketParams& mkt, const QuadratureConfig& cfg = {});
double gamma_truncated(const ReturnDistribution& dist, const TailPolicy& policy,
                       const MarketParams& mkt, const QuadratureConfig& cfg = {});
double gamma_capped(const ReturnDistribution& dist, const TailPolicy& policy,
                    const MarketParams& mkt, const QuadratureConfig& cfg = {});
double vega_truncated(const ReturnDistribution& dist, const TailPolicy& policy,
                      const MarketParams& mkt, const QuadratureConfig& cfg = {});
double vega_capped(const ReturnDistribution& dist, const TailPolicy& policy,
                   const MarketParams& mkt, const QuadratureConfig& cfg = {});

/// Dispatch on policy.mode().
double call_delta(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const QuadratureConfig& cfg = {});
double call_gamma(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const QuadratureConfig& cfg = {});
double call_vega(const ReturnDistribution& dist, const TailPolicy& policy,
                 const MarketParams& mkt, const QuadratureConfig& cfg = {});

/// One-day theta: C0 with rT scaled by 366/365 and sigma_T by sqrt(366/365),
/// minus the base C0.
double theta_numeric(const ReturnDistribution& dist, const TailPolicy& policy,
                     const MarketParams& mkt, const QuadratureConfig& cfg = {});

/// dC0/dnu by finite differences; the tail policy is rebuilt from its
/// probabilities at each bumped nu. Requires a finite nu.
double dprice_dnu(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const FdConfig& fd = {},
                  const QuadratureConfig& cfg = {});

/// dC0/dp_cap by finite differences, re-deriving x_cap at each bumped p_cap.
/// Requires p_cap + step < 1. Central scheme also requires p_cap - step > p_floor.
double dprice_dp(const ReturnDistribution& dist, const TailPolicy& policy,
                 const MarketParams& mkt, const FdConfig& fd = {std::nullopt, FdScheme::Forward},
                 const QuadratureConfig& cfg = {});

/// Generic derivative of a scalar function by the configured scheme.
double finite_difference(const std::function<double(double)>& f, double x, double step,
                         FdScheme scheme);

/// Black-Scholes closed-form call greeks (sigma_T is total volatility).
struct BlackScholesGreeks {
    double delta;
    double gamma;
    double vega;
};
BlackScholesGreeks black_scholes_call_greeks(const MarketParams& mkt);

/// All call greeks for the policy's mode. dC_dnu is 0 for the normal kernel
/// (the Black-Scholes price does not depend on nu); dC_dp is NaN when p_cap = 1.
GreeksReport compute_greeks(const ReturnDistribution& dist, const TailPolicy& policy,
                            const MarketParams& mkt, const QuadratureConfig& cfg = {});

}  // namespace gosset
