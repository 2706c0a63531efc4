#include "gosset/pricing.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gosset/errors.hpp"

namespace gosset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_distribution(const ReturnDistribution& dist, const TailPolicy& policy) {
    if (!(policy.distribution() == dist)) {
        throw ValidationError("tail policy was built for a different return distribution");
    }
}

// P{a <= xi <= b}, evaluated on whichever side keeps the tails accurate.
double mass_between(const ReturnDistribution& dist, double a, double b) {
    if (a >= b) return 0.0;
    if (b <= 0.0) return cdf(dist, b) - cdf(dist, a);
    if (a >= 0.0) return cdf(dist, -a) - cdf(dist, -b);
    return 1.0 - cdf(dist, a) - cdf(dist, -b);
}

double exp_between(const ReturnDistribution& dist, double sigma, double a, double b,
                   const QuadratureConfig& cfg) {
    if (a >= b) return 0.0;
    return integrate_exp_kernel(dist, sigma, Interval{a, b}, cfg);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

struct Context {
    double z;
    double a;
    double boundary;
};

Context make_context(const ReturnDistribution& dist, const TailPolicy& policy,
                     const MarketParams& mkt, const QuadratureConfig& cfg) {
    require_same_distribution(dist, policy);
    const double z = normalization(dist, policy, mkt.vol_to_expiry, cfg);
    return Context{z, martingale_a(mkt, z), exercise_boundary(mkt, z)};
}

PriceQuote make_quote(double at_expiry, const MarketParams& mkt, const Context& ctx) {
    return PriceQuote{at_expiry, at_expiry * std::exp(-mkt.rate_time), ctx.z, ctx.a};
}

}  // namespace

MarketParams::MarketParams(double spot_, double strike_, double rate_time_, double vol_)
    : spot(spot_), strike(strike_), rate_time(rate_time_), vol_to_expiry(vol_) {
    if (!(spot > 0.0 && std::isfinite(spot))) throw ValidationError("spot S0 must be > 0");
    if (!(strike >= 0.0 && std::isfinite(strike))) throw ValidationError("strike K must be >= 0");
    if (!std::isfinite(rate_time)) throw ValidationError("r*T must be finite");
    if (!(vol_to_expiry > 0.0 && std::isfinite(vol_to_expiry))) {
        throw ValidationError("volatility sigma_T must be > 0");
    }
}

TailPolicy::TailPolicy(const ReturnDistribution& dist, TailMode mode, double p_floor,
                       double p_cap, double x_floor, double x_cap)
    : dist_(dist),
      mode_(mode),
      p_floor_(p_floor),
      p_cap_(p_cap),
      x_floor_(x_floor),
      x_cap_(x_cap) {
    if (!(p_floor >= 0.0 && p_floor < p_cap && p_cap <= 1.0)) {
        throw ValidationError("tail probabilities require 0 <= p_floor < p_cap <= 1");
    }
    if (p_cap == 1.0) {
        if (mode == TailMode::Capped) {
            throw ValidationError("a capped asset needs p_cap < 1: the cap integral diverges");
        }
        if (!dist.is_normal()) {
            throw ValidationError(
                "a truncated fat-tailed kernel needs p_cap < 1: E{exp(sigma xi)} diverges");
        }
    }
    if (p_floor > 0.0) {
        eff_p_floor_ = p_floor;
        eff_x_floor_ = x_floor;
    } else {
        eff_p_floor_ = kImplicitTailMass;
        eff_x_floor_ = quantile(dist, kImplicitTailMass);
    }
    if (p_cap < 1.0) {
        eff_p_cap_ = p_cap;
        eff_x_cap_ = x_cap;
    } else {
        eff_p_cap_ = 1.0 - kImplicitTailMass;
        eff_x_cap_ = quantile(dist, 1.0 - kImplicitTailMass);
    }
    if (!(eff_p_floor_ < eff_p_cap_ && eff_x_floor_ < eff_x_cap_)) {
        throw ValidationError("floor and cap leave no probability mass between them");
    }
}

TailPolicy TailPolicy::from_probabilities(const ReturnDistribution& dist, TailMode mode,
                                          double p_floor, double p_cap) {
    if (!(p_floor >= 0.0 && p_floor < p_cap && p_cap <= 1.0)) {
        throw ValidationError("tail probabilities require 0 <= p_floor < p_cap <= 1");
    }
    const double x_floor = p_floor > 0.0 ? quantile(dist, p_floor) : -kInf;
    const double x_cap = p_cap < 1.0 ? quantile(dist, p_cap) : kInf;
    return TailPolicy{dist, mode, p_floor, p_cap, x_floor, x_cap};
}

TailPolicy TailPolicy::from_critical_values(const ReturnDistribution& dist, TailMode mode,
                                            double x_floor, double x_cap) {
    if (std::isnan(x_floor) || std::isnan(x_cap) || !(x_floor < x_cap)) {
        throw ValidationError("critical values require x_floor < x_cap");
    }
    const double p_floor = x_floor == -kInf ? 0.0 : cdf(dist, x_floor);
    const double p_cap = x_cap == kInf ? 1.0 : cdf(dist, x_cap);
    return TailPolicy{dist, mode, p_floor, p_cap, x_floor, x_cap};
}

TailPolicy TailPolicy::with_mode(TailMode mode) const {
    return TailPolicy{dist_, mode, p_floor_, p_cap_, x_floor_, x_cap_};
}

double z_capped(const ReturnDistribution& dist, const TailPolicy& policy, double sigma_t,
                const QuadratureConfig& cfg) {
    require_same_distribution(dist, policy);
    if (policy.mode() != TailMode::Capped) throw ValidationError("z_capped needs a capped policy");
    const double pf = policy.effective_p_floor();
    const double pc = policy.effective_p_cap();
    const double xf = policy.effective_x_floor();
    const double xc = policy.effective_x_cap();
    return pf * std::exp(sigma_t * xf) + exp_between(dist, sigma_t, xf, xc, cfg) +
           (1.0 - pc) * std::exp(sigma_t * xc);
}

double z_truncated(const ReturnDistribution& dist, const TailPolicy& policy, double sigma_t,
                   const QuadratureConfig& cfg) {
    require_same_distribution(dist, policy);
    if (policy.mode() != TailMode::Truncated) {
        throw ValidationError("z_truncated needs a truncated policy");
    }
    const double xf = policy.effective_x_floor();
    const double xc = policy.effective_x_cap();
    const double width = policy.effective_p_cap() - policy.effective_p_floor();
    return exp_between(dist, sigma_t, xf, xc, cfg) / width;
}

double normalization(const ReturnDistribution& dist, const TailPolicy& policy, double sigma_t,
                     const QuadratureConfig& cfg) {
    return policy.mode() == TailMode::Capped ? z_capped(dist, policy, sigma_t, cfg)
                                             : z_truncated(dist, policy, sigma_t, cfg);
}

double martingale_a(const MarketParams& mkt, double z) {
    if (!(z > 0.0)) throw ValidationError("normalization Z must be > 0");
    return mkt.spot * std::exp(mkt.rate_time) / z;
}

double exercise_boundary(const MarketParams& mkt, double z) {
    if (mkt.strike == 0.0) return -kInf;
    return (std::log(z * mkt.strike / mkt.spot) - mkt.rate_time) / mkt.vol_to_expiry;
}

PriceQuote price_call(const ReturnDistribution& dist, const TailPolicy& policy,
                      const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Context ctx = make_context(dist, policy, mkt, cfg);
    if (mkt.strike == 0.0) {
        PriceQuote q = make_quote(mkt.spot * std::exp(mkt.rate_time), mkt, ctx);
        q.value_at_zero = mkt.spot;
        return q;
    }

    const double sigma = mkt.vol_to_expiry;
    const double k = mkt.strike;
    const double pf = policy.effective_p_floor();
    const double pc = policy.effective_p_cap();
    const double xf = policy.effective_x_floor();
    const double xc = policy.effective_x_cap();

    // Strike above the largest attainable price: worthless.
    if (ctx.boundary >= xc) return make_quote(0.0, mkt, ctx);

    // A strike below the floor makes the whole support in the money.
    const double lo = std::max(ctx.boundary, xf);
    const double body = ctx.a * exp_between(dist, sigma, lo, xc, cfg) - k * mass_between(dist, lo, xc);

    double value = 0.0;
    if (policy.mode() == TailMode::Truncated) {
        value = body / (pc - pf);
    } else {
        value = body + (1.0 - pc) * (ctx.a * std::exp(sigma * xc) - k);
        if (ctx.boundary <= xf) value += pf * (ctx.a * std::exp(sigma * xf) - k);
    }
    return make_quote(std::max(value, 0.0), mkt, ctx);
}

PriceQuote price_put(const ReturnDistribution& dist, const TailPolicy& policy,
                     const MarketParams& mkt, const QuadratureConfig& cfg) {
    const Context ctx = make_context(dist, policy, mkt, cfg);
    if (mkt.strike == 0.0) return make_quote(0.0, mkt, ctx);

    const double sigma = mkt.vol_to_expiry;
    const double k = mkt.strike;
    const double pf = policy.effective_p_floor();
    const double pc = policy.effective_p_cap();
    const double xf = policy.effective_x_floor();
    const double xc = policy.effective_x_cap();

    if (ctx.boundary <= xf) return make_quote(0.0, mkt, ctx);

    const double hi = std::min(ctx.boundary, xc);
    const double body = k * mass_between(dist, xf, hi) - ctx.a * exp_between(dist, sigma, xf, hi, cfg);

    double value = 0.0;
    if (policy.mode() == TailMode::Truncated) {
        value = body / (pc - pf);
    } else {
        value = body + pf * (k - ctx.a * std::exp(sigma * xf));
        if (ctx.boundary >= xc) value += (1.0 - pc) * (k - ctx.a * std::exp(sigma * xc));
    }
    return make_quote(std::max(value, 0.0), mkt, ctx);
}

double black_scholes_call(const MarketParams& mkt) {
    const double discount = std::exp(-mkt.rate_time);
    if (mkt.strike == 0.0) return mkt.spot;
    const double sigma = mkt.vol_to_expiry;
    const double d1 = (std::log(mkt.spot / mkt.strike) + mkt.rate_time + 0.5 * sigma * sigma) / sigma;
    const double d2 = d1 - sigma;
    return mkt.spot * norm_cdf(d1) - mkt.strike * discount * norm_cdf(d2);
}

double black_scholes_put(const MarketParams& mkt) {
    const double discount = std::exp(-mkt.rate_time);
    if (mkt.strike == 0.0) return 0.0;
    const double sigma = mkt.vol_to_expiry;
    const double d1 = (std::log(mkt.spot / mkt.strike) + mkt.rate_time + 0.5 * sigma * sigma) / sigma;
    const double d2 = d1 - sigma;
    return mkt.strike * discount * norm_cdf(-d2) - mkt.spot * norm_cdf(-d1);
}

}  // namespace gosset
