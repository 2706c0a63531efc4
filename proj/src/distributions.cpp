#include "gosset/distributions.hpp"

#include <cmath>
#include <numbers>

#include "gosset/errors.hpp"

namespace gosset {

namespace special {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

// Beta function logarithm; the t-distribution always pairs a shape with 1/2,
// which goes through the large-argument-safe ratio.
double log_beta(double a, double b) {
    if (b == 0.5) return log_gamma(0.5) - log_gamma_ratio_half(a);
    if (a == 0.5) return log_gamma(0.5) - log_gamma_ratio_half(b);
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    const int max_iter = 200 + static_cast<int>(20.0 * std::sqrt(std::max(a, b)));

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
        }
    }
    throw NumericalError("incomplete gamma series did not converge");
}

double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
        }
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

double log_gamma_ratio_half(double z) {
    if (z < 50.0) return log_gamma(z + 0.5) - log_gamma(z);
    const double r = 1.0 / z;
    const double r2 = r * r;
    return 0.5 * std::log(z) -
           r * (1.0 / 8.0 - r2 * (1.0 / 192.0 - r2 * (1.0 / 640.0 - r2 * (17.0 / 14336.0))));
}

double incomplete_beta(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_x = x < 0.5 ? std::log(x) : std::log1p(-y);
    const double log_y = y < 0.5 ? std::log(y) : std::log1p(-x);
    const double front = std::exp(a * log_x + b * log_y - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

double incomplete_gamma_lower(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double incomplete_gamma_upper(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_continued_fraction(a, x);
}

double digamma(double x) {
    double result = 0.0;
    while (x < 12.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return result + std::log(x) - 0.5 / x -
           f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 - f * (1.0 / 240.0 - f / 132.0))));
}

double trigamma(double x) {
    double result = 0.0;
    while (x < 12.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return result + 1.0 / x + f / 2.0 +
           f / x * (1.0 / 6.0 - f * (1.0 / 30.0 - f * (1.0 / 42.0 - f * (1.0 / 30.0 - f * 5.0 / 66.0))));
}

}  // namespace special

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Beyond this shape the t lower tail is indistinguishable from the normal one
// at double precision (relative difference O(1/nu)).
constexpr double kNormalCdfCutover = 1e12;

double student_log_norm(double nu) {
    return special::log_gamma_ratio_half(0.5 * nu) - 0.5 * std::log(std::numbers::pi * nu);
}

// P{xi <= x} for x <= 0.
double lower_tail(const ReturnDistribution& dist, double x) {
    if (dist.is_normal() || dist.nu() > kNormalCdfCutover) {
        return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
    }
    if (std::isinf(x)) return 0.0;
    const double nu = dist.nu();
    const double x2 = x * x;
    const double denom = nu + x2;
    return 0.5 * special::incomplete_beta(0.5 * nu, 0.5, nu / denom, x2 / denom);
}

// Solves lower_tail(x) = p for p < 1/2, x < 0. Newton on log cdf with a
// maintained bracket; steps leaving the bracket fall back to bisection.
double lower_quantile(const ReturnDistribution& dist, double p) {
    double hi = 0.0;
    double lo = -1.0;
    while (lower_tail(dist, lo) > p) {
        hi = lo;
        lo *= 2.0;
        if (lo < -1e300) throw NumericalError("quantile bracket search overflowed");
    }
    const double log_p = std::log(p);
    double x = hi < 0.0 ? -std::sqrt(lo * hi) : 0.5 * lo;
    for (int iter = 0; iter < 400; ++iter) {
        const double f = lower_tail(dist, x);
        if (f == p) return x;
        if (f > p) {
            hi = x;
        } else {
            lo = x;
        }
        const double density = pdf(dist, x);
        double next = x - (std::log(f) - log_p) * f / density;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = (hi < 0.0 && lo < 4.0 * hi) ? -std::sqrt(lo * hi) : 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 4e-16 * std::abs(next) || hi - lo <= 4e-16 * std::abs(lo)) {
            return next;
        }
        x = next;
    }
    throw NumericalError("quantile iteration did not converge");
}

}  // namespace

ReturnDistribution ReturnDistribution::student_t(double nu) {
    if (!(nu > 0.0)) throw ValidationError("shape parameter nu must be > 0");
    return ReturnDistribution{nu};
}

double log_pdf(const ReturnDistribution& dist, double x) {
    if (dist.is_normal()) return -0.5 * x * x - kLogSqrt2Pi;
    const double nu = dist.nu();
    return student_log_norm(nu) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double pdf(const ReturnDistribution& dist, double x) { return std::exp(log_pdf(dist, x)); }

double cdf(const ReturnDistribution& dist, double x) {
    if (std::isnan(x)) return x;
    if (x == 0.0) return 0.5;
    if (x < 0.0) return lower_tail(dist, x);
    return 1.0 - lower_tail(dist, -x);
}

double quantile(const ReturnDistribution& dist, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile probability must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return lower_quantile(dist, p);
    return -lower_quantile(dist, 1.0 - p);
}

double two_sided_critical(const ReturnDistribution& dist, double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw ValidationError("two-sided coverage must lie in (0, 1)");
    }
    // quantile((1 + c) / 2) == -quantile((1 - c) / 2); the latter keeps precision as c -> 1.
    return -lower_quantile(dist, 0.5 * (1.0 - coverage));
}

ChiParams::ChiParams(double k_, double scale_) : k(k_), scale(scale_) {
    if (!(k > 0.0 && std::isfinite(k))) throw ValidationError("chi degrees of freedom must be > 0");
    if (!(scale > 0.0 && std::isfinite(scale))) throw ValidationError("chi scale must be > 0");
}

double chi_log_pdf(const ChiParams& params, double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double u = x / params.scale;
    const double half_k = 0.5 * params.k;
    return (params.k - 1.0) * std::log(u) - 0.5 * u * u - (half_k - 1.0) * std::numbers::ln2 -
           special::log_gamma(half_k) - std::log(params.scale);
}

double chi_pdf(const ChiParams& params, double x) {
    if (!(x > 0.0)) return 0.0;
    return std::exp(chi_log_pdf(params, x));
}

double chi_cdf(const ChiParams& params, double x) {
    if (!(x > 0.0)) return 0.0;
    const double u = x / params.scale;
    return special::incomplete_gamma_lower(0.5 * params.k, 0.5 * u * u);
}

double inverse_chi_pdf(const ChiParams& params, double x) {
    if (!(x > 0.0)) throw ValidationError("inverse chi density is defined for x > 0 only");
    const double v = params.scale / x;
    const ChiParams unit{params.k, 1.0};
    return chi_pdf(unit, v) * params.scale / (x * x);
}

double inverse_chi_cdf(const ChiParams& params, double x) {
    if (!(x > 0.0)) return 0.0;
    const double v = params.scale / x;
    return special::incomplete_gamma_upper(0.5 * params.k, 0.5 * v * v);
}

}  // namespace gosset
