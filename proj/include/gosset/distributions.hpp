#pragma once

#include <limits>

namespace gosset {

/// Return kernel: Student's t with shape `nu`, or the standard normal as the
/// nu = infinity member of the family.
class ReturnDistribution {
public:
    /// Throws ValidationError unless nu > 0 (and not NaN). `nu == +inf` yields the normal.
    static ReturnDistribution student_t(double nu);
    static ReturnDistribution normal() noexcept { return ReturnDistribution{kInfinite}; }

    bool is_normal() const noexcept { return nu_ == kInfinite; }

    /// Shape parameter; +infinity for the normal kernel.
    double nu() const noexcept { return nu_; }

    friend bool operator==(const ReturnDistribution&, const ReturnDistribution&) = default;

private:
    static constexpr double kInfinite = std::numeric_limits<double>::infinity();

    explicit ReturnDistribution(double nu) noexcept : nu_(nu) {}

    double nu_;
};

double pdf(const ReturnDistribution& dist, double x);
double log_pdf(const ReturnDistribution& dist, double x);

/// P{xi <= x}. Lower-tail values are computed directly, so cdf(-x) keeps full
/// relative precision in the far tail.
double cdf(const ReturnDistribution& dist, double x);

/// Inverse of cdf. Throws ValidationError unless 0 < p < 1.
double quantile(const ReturnDistribution& dist, double p);

/// x_c with P{-x_c <= xi <= x_c} = coverage, i.e. quantile((1 + coverage) / 2).
double two_sided_critical(const ReturnDistribution& dist, double coverage);

/// Scaled chi law: X = scale * chi_k.
struct ChiParams {
    ChiParams(double k, double scale);

    double k;
    double scale;
};

double chi_pdf(const ChiParams& params, double x);
double chi_log_pdf(const ChiParams& params, double x);
double chi_cdf(const ChiParams& params, double x);

/// Density of Y = scale / chi_k. Throws ValidationError for x <= 0.
double inverse_chi_pdf(const ChiParams& params, double x);
double inverse_chi_cdf(const ChiParams& params, double x);

namespace special {

double log_gamma(double x);

/// lgamma(z + 1/2) - lgamma(z), accurate for large z.
double log_gamma_ratio_half(double z);

/// Regularized incomplete beta I_x(a, b); `y` must equal 1 - x and is passed
/// separately so callers can avoid cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);

/// Regularized lower incomplete gamma P(a, x).
double incomplete_gamma_lower(double a, double x);
double incomplete_gamma_upper(double a, double x);

double digamma(double x);
double trigamma(double x);

}  // namespace special

}  // namespace gosset
