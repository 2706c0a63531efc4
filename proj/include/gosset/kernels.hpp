#pragma once

#include <span>
#include <vector>

#include "gosset/greeks.hpp"

namespace gosset {

/// One grid point: kernel, tail probabilities and market inputs. The tail
/// mode is not part of the point; every row is evaluated under both modes.
struct ModelPoint {
    ReturnDistribution dist;
    double p_floor;
    double p_cap;
    MarketParams mkt;
};

struct PriceRow {
    double call_capped;
    double call_truncated;
    double put_capped;
    double put_truncated;
    double black_scholes_call;
    double black_scholes_put;
};

struct GreeksRow {
    GreeksReport capped;
    GreeksReport truncated;
    BlackScholesGreeks black_scholes;
    /// Central differences of the price in S0 (delta, gamma) and sigma_T (vega).
    BlackScholesGreeks fd_capped;
    BlackScholesGreeks fd_truncated;
};

/// Grid evaluation across OpenMP threads; rows come back in input order.
std::vector<PriceRow> price_grid(std::span<const ModelPoint> points,
                                 const QuadratureConfig& cfg = {});
std::vector<GreeksRow> greeks_grid(std::span<const ModelPoint> points,
                                   const QuadratureConfig& cfg = {});

/// Single-threaded references with identical results.
std::vector<PriceRow> price_grid_serial(std::span<const ModelPoint> points,
                                        const QuadratureConfig& cfg = {});
std::vector<GreeksRow> greeks_grid_serial(std::span<const ModelPoint> points,
                                          const QuadratureConfig& cfg = {});

PriceRow price_point(const ModelPoint& point, const QuadratureConfig& cfg = {});
GreeksRow greeks_point(const ModelPoint& point, const QuadratureConfig& cfg = {});

}  // namespace gosset
