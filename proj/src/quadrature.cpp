#include "gosset/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "gosset/errors.hpp"

namespace gosset {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525856080, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    double magnitude;  // integral of |f| over the panel

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_21(const std::function<double(double)>& f, double lo, double hi) {
    constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
    constexpr double kUnderflow = std::numeric_limits<double>::min();

    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 10> left{};
    std::array<double, 10> right{};
    const double f_center = f(center);
    double kronrod = f_center * kKronrodWeights[10];
    double gauss = 0.0;
    double abs_sum = std::abs(kronrod);
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kKronrodNodes[j];
        left[j] = f(center - dx);
        right[j] = f(center + dx);
        const double pair = left[j] + right[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(left[j]) + std::abs(right[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }

    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[10] * std::abs(f_center - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
    }

    const double scale = std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    abs_sum *= scale;
    asc *= scale;
    if (asc != 0.0 && error != 0.0) {
        error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
    }
    if (abs_sum > kUnderflow / (50.0 * kEpsilon)) {
        error = std::max(50.0 * kEpsilon * abs_sum, error);
    }
    return Panel{lo, hi, kronrod * half, error, abs_sum};
}

// Geometric breakpoints 0, +-1, +-2, +-4, ... inside the interval. Heavy-tailed
// kernels over quantile-derived bounds span several decades; without these the
// first panel can miss the bulk of the mass entirely.
std::vector<double> dyadic_breakpoints(const Interval& iv) {
    std::vector<double> points{0.0};
    const double reach = std::max(std::abs(iv.lo()), std::abs(iv.hi()));
    for (double x = 1.0; x < reach; x *= 2.0) {
        points.push_back(x);
        points.push_back(-x);
    }
    return points;
}

double integrate_kernel(const std::function<double(double)>& f, const Interval& iv,
                        const QuadratureConfig& cfg) {
    const auto points = dyadic_breakpoints(iv);
    return integrate_adaptive(f, iv, cfg, points).value;
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw ValidationError("integration bounds must be finite");
    }
    if (lo > hi) throw ValidationError("integration interval requires lo <= hi");
}

void QuadratureConfig::validate() const {
    if (!(rel_tol >= 1e-14)) throw ValidationError("rel_tol must be >= 1e-14");
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol must be > 0");
    if (max_subdivisions <= 0) throw ValidationError("max_subdivisions must be > 0");
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, const Interval& iv,
                                    const QuadratureConfig& cfg,
                                    std::span<const double> breakpoints) {
    cfg.validate();
    if (iv.width() == 0.0) return {};

    std::vector<double> edges{iv.lo(), iv.hi()};
    for (double b : breakpoints) {
        if (b > iv.lo() && b < iv.hi()) edges.push_back(b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel> panels;
    double total = 0.0;
    double total_error = 0.0;
    double total_magnitude = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p = gauss_kronrod_21(f, edges[i], edges[i + 1]);
        total += p.value;
        total_error += p.error;
        total_magnitude += p.magnitude;
        panels.push(p);
    }

    // The second bound accepts results limited by roundoff: sign-changing
    // integrands with near-zero value cannot reach rel_tol * |value|.
    constexpr double kRoundoff = 100.0 * std::numeric_limits<double>::epsilon();
    const auto converged = [&] {
        return total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)) ||
               total_error <= kRoundoff * total_magnitude;
    };

    int subdivisions = 0;
    while (!converged()) {
        if (subdivisions >= cfg.max_subdivisions) {
            throw QuadratureError("adaptive quadrature did not converge within " +
                                  std::to_string(cfg.max_subdivisions) +
                                  " subdivisions (estimated error " + std::to_string(total_error) +
                                  ")");
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Panel a = gauss_kronrod_21(f, worst.lo, mid);
        const Panel b = gauss_kronrod_21(f, mid, worst.hi);
        total += a.value + b.value - worst.value;
        total_error += a.error + b.error - worst.error;
        total_magnitude += a.magnitude + b.magnitude - worst.magnitude;
        panels.push(a);
        panels.push(b);
        ++subdivisions;
    }

    // Re-sum from the panels so the returned value does not carry the running
    // update's cancellation error.
    double value = 0.0;
    double error = 0.0;
    std::vector<Panel> finished;
    finished.reserve(panels.size());
    while (!panels.empty()) {
        finished.push_back(panels.top());
        panels.pop();
    }
    std::sort(finished.begin(), finished.end(),
              [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
    for (const Panel& p : finished) {
        value += p.value;
        error += p.error;
    }
    return QuadratureResult{value, error, subdivisions};
}

Interval effective_support(const ReturnDistribution& dist, double eps) {
    return Interval{quantile(dist, eps), quantile(dist, 1.0 - eps)};
}

double integrate_exp_kernel(const ReturnDistribution& dist, double sigma, const Interval& iv,
                            const QuadratureConfig& cfg) {
    if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
    return integrate_kernel(
        [&](double xi) { return std::exp(sigma * xi + log_pdf(dist, xi)); }, iv, cfg);
}

double integrate_moment_kernel(const ReturnDistribution& dist, double sigma, const Interval& iv,
                               const QuadratureConfig& cfg) {
    if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
    return integrate_kernel(
        [&](double xi) { return xi * std::exp(sigma * xi + log_pdf(dist, xi)); }, iv, cfg);
}

double integrate_second_moment(const ReturnDistribution& dist, const Interval& iv,
                               const QuadratureConfig& cfg) {
    return integrate_kernel([&](double xi) { return xi * xi * pdf(dist, xi); }, iv, cfg);
}

}  // namespace gosset
