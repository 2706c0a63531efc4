#include "gosset/kernels.hpp"

#include <cmath>

#include "parallel.hpp"

namespace gosset {

namespace {

BlackScholesGreeks fd_greeks(const ModelPoint& pt, const TailPolicy& policy,
                             const QuadratureConfig& cfg) {
    const MarketParams& m = pt.mkt;
    const auto call = [&](double spot, double sigma) {
        return price_call(pt.dist, policy, MarketParams{spot, m.strike, m.rate_time, sigma}, cfg)
            .value_at_zero;
    };
    const double hs = 1e-3 * m.spot;
    const double hv = 1e-5 * m.vol_to_expiry;
    const double up = call(m.spot + hs, m.vol_to_expiry);
    const double mid = call(m.spot, m.vol_to_expiry);
    const double down = call(m.spot - hs, m.vol_to_expiry);
    return {(up - down) / (2.0 * hs), (up - 2.0 * mid + down) / (hs * hs),
            (call(m.spot, m.vol_to_expiry + hv) - call(m.spot, m.vol_to_expiry - hv)) / (2.0 * hv)};
}

}  // namespace

PriceRow price_point(const ModelPoint& pt, const QuadratureConfig& cfg) {
    const auto capped = TailPolicy::from_probabilities(pt.dist, TailMode::Capped, pt.p_floor, pt.p_cap);
    const auto truncated = capped.with_mode(TailMode::Truncated);
    return {price_call(pt.dist, capped, pt.mkt, cfg).value_at_zero,
            price_call(pt.dist, truncated, pt.mkt, cfg).value_at_zero,
            price_put(pt.dist, capped, pt.mkt, cfg).value_at_zero,
            price_put(pt.dist, truncated, pt.mkt, cfg).value_at_zero,
            black_scholes_call(pt.mkt),
            black_scholes_put(pt.mkt)};
}

GreeksRow greeks_point(const ModelPoint& pt, const QuadratureConfig& cfg) {
    const auto capped = TailPolicy::from_probabilities(pt.dist, TailMode::Capped, pt.p_floor, pt.p_cap);
    const auto truncated = capped.with_mode(TailMode::Truncated);
    return {compute_greeks(pt.dist, capped, pt.mkt, cfg),
            compute_greeks(pt.dist, truncated, pt.mkt, cfg),
            black_scholes_call_greeks(pt.mkt),
            fd_greeks(pt, capped, cfg),
            fd_greeks(pt, truncated, cfg)};
}

std::vector<PriceRow> price_grid(std::span<const ModelPoint> points, const QuadratureConfig& cfg) {
    std::vector<PriceRow> rows(points.size());
    detail::parallel_for(points.size(), [&](std::size_t i) { rows[i] = price_point(points[i], cfg); });
    return rows;
}

std::vector<GreeksRow> greeks_grid(std::span<const ModelPoint> points, const QuadratureConfig& cfg) {
    std::vector<GreeksRow> rows(points.size());
    detail::parallel_for(points.size(), [&](std::size_t i) { rows[i] = greeks_point(points[i], cfg); });
    return rows;
}

std::vector<PriceRow> price_grid_serial(std::span<const ModelPoint> points,
                                        const QuadratureConfig& cfg) {
    std::vector<PriceRow> rows;
    rows.reserve(points.size());
    for (const auto& pt : points) rows.push_back(price_point(pt, cfg));
    return rows;
}

std::vector<GreeksRow> greeks_grid_serial(std::span<const ModelPoint> points,
                                          const QuadratureConfig& cfg) {
    std::vector<GreeksRow> rows;
    rows.reserve(points.size());
    for (const auto& pt : points) rows.push_back(greeks_point(pt, cfg));
    return rows;
}

}  // namespace gosset
