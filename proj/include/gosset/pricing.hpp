#pragma once

#include "gosset/distributions.hpp"
#include "gosset/quadrature.hpp"

namespace gosset {

/// Spot, strike and the two horizon-scaled quantities the model needs.
struct MarketParams {
    MarketParams(double spot, double strike, double rate_time, double vol_to_expiry);

    double spot;           ///< S0 > 0
    double strike;         ///< K_T >= 0
    double rate_time;      ///< r * T
    double vol_to_expiry;  ///< sigma_T > 0
};

enum class TailMode { Capped, Truncated };

/// Probability mass assigned below the floor when no floor is requested; the
/// floor critical value then sits at quantile(kImplicitTailMass) rather than -inf.
inline constexpr double kImplicitTailMass = 1e-12;

/// Floor/cap placement for one return distribution.
///
/// The user-facing probabilities (p_floor, p_cap) and critical values (x_floor,
/// x_cap) keep their logical meaning: p_floor = 0 gives x_floor = -inf. Pricing
/// integrals use the `effective_*` values, which replace an absent floor (or a
/// cap at p = 1) with the finite bound at kImplicitTailMass and move that mass
/// into the boundary term, so normalization and put-call parity stay exact.
class TailPolicy {
public:
    /// Derives critical values via quantile. Requires 0 <= p_floor < p_cap <= 1.
    /// p_cap = 1 is accepted only for a truncated normal kernel; fat-tailed
    /// kernels and capped assets diverge there.
    static TailPolicy from_probabilities(const ReturnDistribution& dist, TailMode mode,
                                         double p_floor, double p_cap);

    /// Derives probabilities via cdf. x_floor may be -inf (no floor).
    static TailPolicy from_critical_values(const ReturnDistribution& dist, TailMode mode,
                                           double x_floor, double x_cap);

    const ReturnDistribution& distribution() const noexcept { return dist_; }
    TailMode mode() const noexcept { return mode_; }

    double p_floor() const noexcept { return p_floor_; }
    double p_cap() const noexcept { return p_cap_; }
    double x_floor() const noexcept { return x_floor_; }
    double x_cap() const noexcept { return x_cap_; }

    double effective_p_floor() const noexcept { return eff_p_floor_; }
    double effective_p_cap() const noexcept { return eff_p_cap_; }
    double effective_x_floor() const noexcept { return eff_x_floor_; }
    double effective_x_cap() const noexcept { return eff_x_cap_; }

    /// Same placement probabilities under another mode.
    TailPolicy with_mode(TailMode mode) const;

private:
    TailPolicy(const ReturnDistribution& dist, TailMode mode, double p_floor, double p_cap,
               double x_floor, double x_cap);

    ReturnDistribution dist_;
    TailMode mode_;
    double p_floor_;
    double p_cap_;
    double x_floor_;
    double x_cap_;
    double eff_p_floor_;
    double eff_p_cap_;
    double eff_x_floor_;
    double eff_x_cap_;
};

struct PriceQuote {
    double value_at_expiry;  ///< C_T or P_T
    double value_at_zero;    ///< discounted by exp(-rT)
    double z;                ///< normalization E{exp(sigma_T xi)} under the tail policy
    double a_t;              ///< martingale constant, A_T * Z = S0 exp(rT)
};

/// p_floor e^{sigma x_p} + int_{x_p}^{x_c} e^{sigma xi} f + (1 - p_cap) e^{sigma x_c}.
double z_capped(const ReturnDistribution& dist, const TailPolicy& policy, double sigma_t,
                const QuadratureConfig& cfg = {});

/// int_{x_p}^{x_c} e^{sigma xi} f / (p_cap - p_floor).
double z_truncated(const ReturnDistribution& dist, const TailPolicy& policy, double sigma_t,
                   const QuadratureConfig& cfg = {});

/// Dispatches on policy.mode().
double normalization(const ReturnDistribution& dist, const TailPolicy& policy, double sigma_t,
                     const QuadratureConfig& cfg = {});

/// A_T = S0 exp(rT) / Z.
double martingale_a(const MarketParams& mkt, double z);

/// Lower integration limit of the call, (ln(Z K / S0) - rT) / sigma_T. -inf for K = 0.
double exercise_boundary(const MarketParams& mkt, double z);

PriceQuote price_call(const ReturnDistribution& dist, const TailPolicy& policy,
                      const MarketParams& mkt, const QuadratureConfig& cfg = {});
PriceQuote price_put(const ReturnDistribution& dist, const TailPolicy& policy,
                     const MarketParams& mkt, const QuadratureConfig& cfg = {});

/// Closed-form Black-Scholes with total volatility sigma_T; K = 0 returns the limits.
double black_scholes_call(const MarketParams& mkt);
double black_scholes_put(const MarketParams& mkt);

}  // namespace gosset
