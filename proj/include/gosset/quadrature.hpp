#pragma once

#include <functional>
#include <span>

#include "gosset/distributions.hpp"

namespace gosset {

/// Finite integration bounds, lo <= hi.
class Interval {
public:
    Interval(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }

private:
    double lo_;
    double hi_;
};

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    /// Number of panel bisections allowed on top of the initial breakpoints.
    int max_subdivisions = 200;

    /// Throws ValidationError on out-of-range settings.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod integration of `f` over `iv`.
/// `breakpoints` (any order; values outside the interval are ignored) seed the
/// initial panels. Throws QuadratureError if the budget runs out before the
/// estimated error drops below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, const Interval& iv,
                                    const QuadratureConfig& cfg = {},
                                    std::span<const double> breakpoints = {});

/// [quantile(eps), quantile(1 - eps)]: the finite stand-in for the full real line.
Interval effective_support(const ReturnDistribution& dist, double eps = 1e-12);

/// Integral of exp(sigma * xi) f(xi) over `iv`.
double integrate_exp_kernel(const ReturnDistribution& dist, double sigma, const Interval& iv,
                            const QuadratureConfig& cfg = {});

/// Integral of xi exp(sigma * xi) f(xi) over `iv`: the sigma-derivative of the exp kernel.
double integrate_moment_kernel(const ReturnDistribution& dist, double sigma, const Interval& iv,
                               const QuadratureConfig& cfg = {});

/// Integral of xi^2 f(xi) over `iv`.
double integrate_second_moment(const ReturnDistribution& dist, const Interval& iv,
                               const QuadratureConfig& cfg = {});

}  // namespace gosset
