#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gosset/distributions.hpp"
#include "gosset/quadrature.hpp"

namespace gosset {

/// sqrt(int_{-x_c}^{x_c} xi^2 f / p_N) * scale with x_c = two_sided_critical(p_N).
/// p_N = 1 uses the closed form and needs nu > 2.
double expected_volatility(const ReturnDistribution& dist, double coverage, double scale = 1.0,
                           const QuadratureConfig& cfg = {});

/// expected_volatility(coverage) / expected_volatility(1).
double normalized_volatility(const ReturnDistribution& dist, double coverage,
                             const QuadratureConfig& cfg = {});

struct VolCurve {
    std::vector<double> nu;
    std::vector<double> coverage;
    std::vector<std::vector<double>> ratio;  ///< [coverage][nu]
};

/// Normalized expected volatility on a grid; +inf in `nu_grid` is the normal asymptote.
VolCurve normalized_vol_curve(std::span<const double> nu_grid, std::span<const double> coverages,
                              const QuadratureConfig& cfg = {});

struct DropSummary {
    int drop = 0;        ///< total samples removed, half from each end
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;  ///< N - 1 divisor
};

/// Per-window volatilities of non-overlapping windows, one list per drop level.
struct WindowStudy {
    int window_len = 0;
    std::vector<int> drop_counts;
    std::vector<std::vector<double>> volatilities;  ///< [level][window]
    std::vector<DropSummary> summary;
    std::vector<std::size_t> zero_variance_windows;  ///< windows whose full-range volatility is 0

    std::size_t window_count() const {
        return volatilities.empty() ? 0 : volatilities.front().size();
    }
};

/// Sample standard deviation (N - 1) of `values` after sorting and removing
/// drop / 2 values from each end.
double trimmed_volatility(std::span<const double> window, int drop);

/// Splits `returns` into floor(n / window_len) windows and computes the
/// trimmed volatility of each for every drop count. Drops must be even, >= 0
/// and leave at least 2 values.
WindowStudy window_volatilities(std::span<const double> returns, int window_len,
                                std::span<const int> drops);
WindowStudy window_volatilities_serial(std::span<const double> returns, int window_len,
                                       std::span<const int> drops);

/// Monte Carlo study: n_trials windows of iid scale * xi draws. Trial i uses
/// substream stream_seed(seed, i), so the result does not depend on threading.
WindowStudy simulate_window_study(const ReturnDistribution& dist, int window_len,
                                  std::span<const int> drops, int n_trials, std::uint64_t seed,
                                  double scale = 1.0);
WindowStudy simulate_window_study_serial(const ReturnDistribution& dist, int window_len,
                                         std::span<const int> drops, int n_trials,
                                         std::uint64_t seed, double scale = 1.0);

enum class CovarianceForm {
    AsPrinted,  ///< ... - (B/A^3) s_AB
    Textbook,   ///< ... - 2 (B/A^3) s_AB
};

/// Two-sigma uncertainty of B/A from the means, their standard errors and their
/// covariance s_AB. Throws NegativeVarianceError if the variance comes out negative.
double ratio_uncertainty(double mean_a, double s_a, double mean_b, double s_b, double s_ab,
                         CovarianceForm form = CovarianceForm::AsPrinted);

/// Normalized mean volatility of one drop level relative to the full window.
struct RatioObservation {
    int drop = 0;
    double coverage = 1.0;  ///< (N - drop) / N
    double ratio = 1.0;
    double uncertainty = 0.0;  ///< two-sigma
};

/// One observation per nonzero drop level. Requires drop 0 in the study and a
/// nonzero full-range mean volatility.
std::vector<RatioObservation> volatility_ratios(const WindowStudy& study,
                                                CovarianceForm form = CovarianceForm::AsPrinted);

enum class CurveModel {
    TruncatedPdf,  ///< normalized expected volatility of the truncated density
    FiniteWindow,  ///< Monte Carlo drop-extremes ratio for the actual window length
};

struct FiniteWindowOptions {
    int windows_per_point = 20000;
    int grid_points = 19;
    double u_max = 0.45;  ///< largest 1/nu on the grid
    int max_degree = 5;
    std::uint64_t seed = 20090301;
};

/// Expected normalized volatility as a function of u = 1/nu (u = 0 is the
/// normal kernel), one branch per drop level. Decreasing in u.
class CalibrationCurve {
public:
    static CalibrationCurve truncated_pdf(std::vector<double> coverages,
                                          const QuadratureConfig& cfg = {});
    static CalibrationCurve finite_window(int window_len, std::vector<int> drops,
                                          const FiniteWindowOptions& options = {});

    CurveModel model() const noexcept { return model_; }
    std::size_t levels() const noexcept { return coverages_.size(); }
    double coverage(std::size_t level) const { return coverages_.at(level); }
    double u_max() const noexcept { return u_max_; }

    double ratio_at_u(std::size_t level, double u) const;
    double ratio_at_nu(std::size_t level, double nu) const;

    /// ratio_at_u(level, 0) and ratio_at_u(level, u_max()).
    double asymptote(std::size_t level) const { return ratio_at_u(level, 0.0); }
    double edge(std::size_t level) const { return ratio_at_u(level, u_max_); }

    /// u with ratio_at_u(level, u) = ratio. Throws NoSolutionError outside [edge, asymptote].
    double invert(std::size_t level, double ratio) const;

    /// Level whose coverage matches within 1e-12; throws ValidationError if none.
    std::size_t level_for(double coverage) const;

    /// Polynomial coefficients in u (finite-window model only).
    const std::vector<std::vector<double>>& coefficients() const noexcept { return poly_; }

private:
    CalibrationCurve() = default;

    CurveModel model_ = CurveModel::TruncatedPdf;
    std::vector<double> coverages_;
    double u_max_ = 0.5;
    QuadratureConfig cfg_;
    std::vector<std::vector<double>> poly_;
};

struct LevelEstimate {
    RatioObservation observation;
    double nu_hat = 0.0;
    double nu_lo = 0.0;
    double nu_hi = 0.0;
};

struct CalibrationResult {
    double nu_hat = 0.0;
    double nu_lo = 0.0;
    double nu_hi = std::numeric_limits<double>::infinity();
    CurveModel model = CurveModel::TruncatedPdf;
    std::vector<LevelEstimate> levels;
};

/// Inverts the curve per drop level and combines the estimates by inverse-variance
/// weighting in u = 1/nu. The interval uses the fully correlated combination of
/// the per-level widths since all levels come from the same windows.
CalibrationResult estimate_nu_from_ratios(std::span<const RatioObservation> observations,
                                          const CalibrationCurve& curve);

CalibrationResult estimate_nu(const WindowStudy& study, const CalibrationCurve& curve,
                              CovarianceForm form = CovarianceForm::AsPrinted);

struct EstimateOptions {
    CurveModel model = CurveModel::TruncatedPdf;
    CovarianceForm form = CovarianceForm::AsPrinted;
    FiniteWindowOptions window;
};

/// Builds the curve for the study's window length and drops, then estimates.
CalibrationResult estimate_nu(const WindowStudy& study, const EstimateOptions& options = {});

enum class ChiTarget { Volatility, ReciprocalVolatility };
enum class ChiFitMethod { MaximumLikelihood, BinnedLeastSquares };

struct ChiBin {
    double lo = 0.0;
    double hi = 0.0;
    double observed = 0.0;  ///< histogram density
    double expected = 0.0;  ///< fitted density integrated over the bin, per unit width
    double residual = 0.0;  ///< observed - expected
};

struct CdfPoint {
    double x = 0.0;
    double empirical = 0.0;
    double fitted = 0.0;
};

struct ChiFit {
    ChiParams params{1.0, 1.0};
    ChiTarget target = ChiTarget::Volatility;
    ChiFitMethod method = ChiFitMethod::MaximumLikelihood;
    double ks = 0.0;
    double sse = 0.0;  ///< sum of squared bin residuals
    std::vector<ChiBin> bins;
    std::vector<CdfPoint> cdf;
};

/// Fits scale * chi_k to the samples (or to their reciprocals). Requires at least
/// 30 positive samples. `bins` = 0 picks ceil(2 n^(1/3)).
ChiFit fit_chi(std::span<const double> samples, ChiTarget target,
               ChiFitMethod method = ChiFitMethod::MaximumLikelihood, int bins = 0);

}  // namespace gosset
