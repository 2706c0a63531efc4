#include "gosset/greeks.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gosset/errors.hpp"

namespace gosset {

namespace {

struct Setup {
    double z;
    double boundary;  // (ln(Z K / S0) - rT) / sigma_T
    double pf, pc, xf, xc;
};

Setup prepare(const ReturnDistribution& dist, const TailPolicy& policy, const MarketParams& mkt,
              TailMode expected, const QuadratureConfig& cfg) {
    if (!(policy.distribution() == dist)) {
        throw ValidationError("tail policy was built for a different return distribution");
    }
    if (policy.mode() != expected) {
        throw ValidationError(expected == TailMode::Capped ? "expected a capped tail policy"
                                                           : "expected a truncated tail policy");
    }
    const double z = normalization(dist, policy, mkt.vol_to_expiry, cfg);
    return Setup{z,
                 exercise_boundary(mkt, z),
                 policy.effective_p_floor(),
                 policy.effective_p_cap(),
                 policy.effective_x_floor(),
                 policy.effective_x_cap()};
}

double exp_between(const ReturnDistribution& dist, double sigma, double a, double b,
                   const QuadratureConfig& cfg) {
    if (a >= b) return 0.0;
    return integrate_exp_kernel(dist, sigma, Interval{a, b}, cfg);
}

double moment_between(const ReturnDistribution& dist, double sigma, double a, double b,
                      const QuadratureConfig& cfg) {
    if (a >= b) return 0.0;
    return integrate_moment_kernel(dist, sigma, Interval{a, b}, cfg);
}

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double call_value(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const QuadratureConfig& cfg) {
    return price_call(dist, policy, mkt, cfg).value_at_zero;
}

void check_step(double h) {
    if (!(h > 0.0 && std::isfinite(h))) throw ValidationError("finite-difference step must be > 0");
}

}  // namespace

double finite_difference(const std::function<double(double)>& f, double x, double step,
                         FdScheme scheme) {
    check_step(step);
    if (scheme == FdScheme::Central) return (f(x + step) - f(x - step)) / (2.0 * step);
    return (f(x + step) - f(x)) / step;
}

double delta_truncated(const ReturnDistribution& dist, const TailPolicy& policy,
                       const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Setup s = prepare(dist, policy, mkt, TailMode::Truncated, cfg);
    if (s.boundary >= s.xc) return 0.0;
    const double lo = std::max(s.boundary, s.xf);
    return exp_between(dist, mkt.vol_to_expiry, lo, s.xc, cfg) / (s.z * (s.pc - s.pf));
}

double delta_capped(const ReturnDistribution& dist, const TailPolicy& policy,
                    const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Setup s = prepare(dist, policy, mkt, TailMode::Capped, cfg);
    if (s.boundary >= s.xc) return 0.0;
    const double sigma = mkt.vol_to_expiry;
    const double lo = std::max(s.boundary, s.xf);
    double sum = exp_between(dist, sigma, lo, s.xc, cfg) + (1.0 - s.pc) * std::exp(sigma * s.xc);
    if (s.boundary <= s.xf) sum += s.pf * std::exp(sigma * s.xf);
    return sum / s.z;
}

double gamma_truncated(const ReturnDistribution& dist, const TailPolicy& policy,
                       const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Setup s = prepare(dist, policy, mkt, TailMode::Truncated, cfg);
    if (s.boundary <= s.xf || s.boundary >= s.xc) return 0.0;
    return mkt.strike * std::exp(-mkt.rate_time) * pdf(dist, s.boundary) /
           (mkt.spot * mkt.spot * mkt.vol_to_expiry * (s.pc - s.pf));
}

double gamma_capped(const ReturnDistribution& dist, const TailPolicy& policy,
                    const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Setup s = prepare(dist, policy, mkt, TailMode::Capped, cfg);
    if (s.boundary <= s.xf || s.boundary >= s.xc) return 0.0;
    return mkt.strike * std::exp(-mkt.rate_time) * pdf(dist, s.boundary) /
           (mkt.spot * mkt.spot * mkt.vol_to_expiry);
}

double vega_truncated(const ReturnDistribution& dist, const TailPolicy& policy,
                      const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Setup s = prepare(dist, policy, mkt, TailMode::Truncated, cfg);
    if (s.boundary >= s.xc) return 0.0;
    const double sigma = mkt.vol_to_expiry;
    const double width = s.pc - s.pf;
    const double lo = std::max(s.boundary, s.xf);
    const double dz = moment_between(dist, sigma, s.xf, s.xc, cfg) / width;
    const double moment = moment_between(dist, sigma, lo, s.xc, cfg);
    const double mass = exp_between(dist, sigma, lo, s.xc, cfg);
    return mkt.spot / (s.z * width) * moment - mkt.spot * dz / (s.z * s.z * width) * mass;
}

double vega_capped(const ReturnDistribution& dist, const TailPolicy& policy,
                   const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Setup s = prepare(dist, policy, mkt, TailMode::Capped, cfg);
    if (s.boundary >= s.xc) return 0.0;
    const double sigma = mkt.vol_to_expiry;
    const double lo = std::max(s.boundary, s.xf);
    const double floor_weight = s.pf * std::exp(sigma * s.xf);
    const double cap_weight = (1.0 - s.pc) * std::exp(sigma * s.xc);
    const double dz = s.xf * floor_weight + moment_between(dist, sigma, s.xf, s.xc, cfg) +
                      s.xc * cap_weight;
    const double log_dz = dz / s.z;
    const double moment = moment_between(dist, sigma, lo, s.xc, cfg);
    const double mass = exp_between(dist, sigma, lo, s.xc, cfg);
    double vega = mkt.spot / s.z * (moment - log_dz * mass) +
                  mkt.spot * cap_weight / s.z * (s.xc - log_dz);
    if (s.boundary <= s.xf) vega += mkt.spot * floor_weight / s.z * (s.xf - log_dz);
    return vega;
}

double call_delta(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const QuadratureConfig& cfg) {
    return policy.mode() == TailMode::Capped ? delta_capped(dist, policy, mkt, cfg)
                                             : delta_truncated(dist, policy, mkt, cfg);
}

double call_gamma(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const QuadratureConfig& cfg) {
    return policy.mode() == TailMode::Capped ? gamma_capped(dist, policy, mkt, cfg)
                                             : gamma_truncated(dist, policy, mkt, cfg);
}

double call_vega(const ReturnDistribution& dist, const TailPolicy& policy,
                 const MarketParams& mkt, const QuadratureConfig& cfg) {
    return policy.mode() == TailMode::Capped ? vega_capped(dist, policy, mkt, cfg)
                                             : vega_truncated(dist, policy, mkt, cfg);
}

double theta_numeric(const ReturnDistribution& dist, const TailPolicy& policy,
                     const MarketParams& mkt, const QuadratureConfig& cfg) {
    constexpr double kDayFactor = 366.0 / 365.0;
    const MarketParams later{mkt.spot, mkt.strike, mkt.rate_time * kDayFactor,
                             mkt.vol_to_expiry * std::sqrt(kDayFactor)};
    return call_value(dist, policy, later, cfg) - call_value(dist, policy, mkt, cfg);
}

double dprice_dnu(const ReturnDistribution& dist, const TailPolicy& policy,
                  const MarketParams& mkt, const FdConfig& fd, const QuadratureConfig& cfg) {
    if (dist.is_normal()) throw ValidationError("dC/dnu needs a finite shape parameter");
    const double nu = dist.nu();
    const double h = fd.step.value_or(1e-5 * nu);
    check_step(h);
    if (fd.scheme == FdScheme::Central && !(nu - h > 0.0)) {
        throw ValidationError("nu step must keep nu - step > 0");
    }
    const auto price_at = [&](double shape) {
        const auto bumped = ReturnDistribution::student_t(shape);
        const auto bumped_policy = TailPolicy::from_probabilities(bumped, policy.mode(),
                                                                  policy.p_floor(), policy.p_cap());
        return call_value(bumped, bumped_policy, mkt, cfg);
    };
    return finite_difference(price_at, nu, h, fd.scheme);
}

double dprice_dp(const ReturnDistribution& dist, const TailPolicy& policy,
                 const MarketParams& mkt, const FdConfig& fd, const QuadratureConfig& cfg) {
    if (!(policy.distribution() == dist)) {
        throw ValidationError("tail policy was built for a different return distribution");
    }
    const double p = policy.p_cap();
    const double h = fd.step.value_or(1e-3 * (1.0 - p));
    check_step(h);
    if (!(p + h < 1.0)) throw ValidationError("cap probability step must keep p_cap + step < 1");
    if (fd.scheme == FdScheme::Central && !(p - h > policy.p_floor())) {
        throw ValidationError("cap probability step must keep p_cap - step > p_floor");
    }
    const auto price_at = [&](double p_cap) {
        const auto bumped =
            TailPolicy::from_probabilities(dist, policy.mode(), policy.p_floor(), p_cap);
        return call_value(dist, bumped, mkt, cfg);
    };
    return finite_difference(price_at, p, h, fd.scheme);
}

BlackScholesGreeks black_scholes_call_greeks(const MarketParams& mkt) {
    if (mkt.strike == 0.0) return {1.0, 0.0, 0.0};
    const double sigma = mkt.vol_to_expiry;
    const double d1 =
        (std::log(mkt.spot / mkt.strike) + mkt.rate_time + 0.5 * sigma * sigma) / sigma;
    return {norm_cdf(d1), norm_pdf(d1) / (mkt.spot * sigma), mkt.spot * norm_pdf(d1)};
}

GreeksReport compute_greeks(const ReturnDistribution& dist, const TailPolicy& policy,
                            const MarketParams& mkt, const QuadratureConfig& cfg) {
    GreeksReport report;
    report.delta = call_delta(dist, policy, mkt, cfg);
    report.gamma = call_gamma(dist, policy, mkt, cfg);
    report.vega = call_vega(dist, policy, mkt, cfg);
    report.theta = theta_numeric(dist, policy, mkt, cfg);
    report.dC_dnu = dist.is_normal() ? 0.0 : dprice_dnu(dist, policy, mkt, {}, cfg);
    report.dC_dp = policy.p_cap() < 1.0 ? dprice_dp(dist, policy, mkt, {std::nullopt, FdScheme::Forward}, cfg)
                                        : std::numeric_limits<double>::quiet_NaN();
    return report;
}

}  // namespace gosset
