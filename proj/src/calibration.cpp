#include "gosset/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "gosset/errors.hpp"
#include "gosset/sampling.hpp"
#include "parallel.hpp"

namespace gosset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Sorted input: identical values give exactly 0 rather than a roundoff residue.
double sorted_stddev(std::span<const double> v) {
    if (v.empty() || v.front() == v.back()) return 0.0;
    return stddev_of(v);
}

double covariance_of(std::span<const double> a, std::span<const double> b) {
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size() - 1);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void validate_drops(int window_len, std::span<const int> drops) {
    if (window_len < 2) throw ValidationError("window length must be >= 2");
    if (drops.empty()) throw ValidationError("at least one drop count is required");
    for (int d : drops) {
        if (d < 0 || d % 2 != 0) throw ValidationError("drop counts must be even and >= 0");
        if (window_len - d < 2) {
            throw ValidationError("drop count " + std::to_string(d) +
                                  " leaves fewer than 2 values in a window of " +
                                  std::to_string(window_len));
        }
    }
}

WindowStudy empty_study(int window_len, std::span<const int> drops, std::size_t windows) {
    WindowStudy study;
    study.window_len = window_len;
    study.drop_counts.assign(drops.begin(), drops.end());
    study.volatilities.assign(drops.size(), std::vector<double>(windows));
    return study;
}

// Sorts `scratch` in place and writes each level's trimmed volatility.
void window_row(std::vector<double>& scratch, std::span<const int> drops, WindowStudy& study,
                std::size_t window) {
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t level = 0; level < drops.size(); ++level) {
        const auto half = static_cast<std::size_t>(drops[level] / 2);
        const std::span<const double> kept(scratch.data() + half, scratch.size() - 2 * half);
        study.volatilities[level][window] = sorted_stddev(kept);
    }
}

void summarize(WindowStudy& study) {
    study.summary.clear();
    for (std::size_t level = 0; level < study.drop_counts.size(); ++level) {
        const auto& v = study.volatilities[level];
        study.summary.push_back({study.drop_counts[level], mean_of(v), median_of(v), stddev_of(v)});
    }
    study.zero_variance_windows.clear();
    const auto full = std::find(study.drop_counts.begin(), study.drop_counts.end(), 0);
    const auto& reference =
        study.volatilities[full == study.drop_counts.end()
                               ? 0
                               : static_cast<std::size_t>(full - study.drop_counts.begin())];
    for (std::size_t w = 0; w < reference.size(); ++w) {
        if (reference[w] == 0.0) study.zero_variance_windows.push_back(w);
    }
}

template <class Loop>
WindowStudy windows_impl(std::span<const double> returns, int window_len,
                         std::span<const int> drops, Loop loop) {
    validate_drops(window_len, drops);
    const auto len = static_cast<std::size_t>(window_len);
    if (returns.size() < len) {
        throw ValidationError("series has " + std::to_string(returns.size()) +
                              " returns, fewer than one window of " + std::to_string(window_len));
    }
    for (double r : returns) {
        if (!std::isfinite(r)) throw ValidationError("returns must be finite");
    }
    const std::size_t windows = returns.size() / len;
    WindowStudy study = empty_study(window_len, drops, windows);
    loop(windows, [&](std::size_t w) {
        std::vector<double> scratch(returns.begin() + w * len, returns.begin() + (w + 1) * len);
        window_row(scratch, drops, study, w);
    });
    summarize(study);
    return study;
}

template <class Loop>
WindowStudy simulate_impl(const ReturnDistribution& dist, int window_len,
                          std::span<const int> drops, int n_trials, std::uint64_t seed,
                          double scale, Loop loop) {
    validate_drops(window_len, drops);
    if (n_trials < 1) throw ValidationError("number of trials must be >= 1");
    ReturnSampler check(dist, scale);
    const auto trials = static_cast<std::size_t>(n_trials);
    WindowStudy study = empty_study(window_len, drops, trials);
    loop(trials, [&](std::size_t trial) {
        std::mt19937_64 rng(stream_seed(seed, trial));
        ReturnSampler draw(dist, scale);
        std::vector<double> scratch(static_cast<std::size_t>(window_len));
        for (double& x : scratch) x = draw(rng);
        window_row(scratch, drops, study, trial);
    });
    summarize(study);
    return study;
}

const auto kParallel = [](std::size_t n, const auto& body) { detail::parallel_for(n, body); };
const auto kSerial = [](std::size_t n, const auto& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
};

ReturnDistribution from_u(double u) {
    return u == 0.0 ? ReturnDistribution::normal() : ReturnDistribution::student_t(1.0 / u);
}

double nu_from_u(double u) { return u <= 0.0 ? kInf : 1.0 / u; }

double horner(const std::vector<double>& c, double u) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * u + *it;
    return v;
}

std::vector<double> fit_polynomial(const std::vector<double>& u, const std::vector<double>& y,
                                   int degree) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(u.size()), degree + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        double p = 1.0;
        for (int j = 0; j <= degree; ++j, p *= u[i]) a(static_cast<Eigen::Index>(i), j) = p;
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    return {c.data(), c.data() + c.size()};
}

bool nonincreasing(const std::vector<double>& c, double u_max) {
    constexpr int kProbe = 400;
    double prev = horner(c, 0.0);
    for (int i = 1; i <= kProbe; ++i) {
        const double next = horner(c, u_max * i / kProbe);
        if (next > prev + 1e-12) return false;
        prev = next;
    }
    return true;
}

struct BinnedObjective {
    std::span<const double> bin_lo;
    std::span<const double> bin_hi;
    std::span<const double> observed;
};

double binned_expected(const ChiParams& p, double lo, double hi) {
    return (chi_cdf(p, hi) - chi_cdf(p, lo)) / (hi - lo);
}

double binned_sse(const gsl_vector* x, void* data) {
    const auto* obj = static_cast<const BinnedObjective*>(data);
    const double k = std::exp(gsl_vector_get(x, 0));
    const double s = std::exp(gsl_vector_get(x, 1));
    if (!std::isfinite(k) || !std::isfinite(s) || k <= 0.0 || s <= 0.0) return 1e300;
    const ChiParams p{k, s};
    double sse = 0.0;
    for (std::size_t i = 0; i < obj->observed.size(); ++i) {
        const double r = obj->observed[i] - binned_expected(p, obj->bin_lo[i], obj->bin_hi[i]);
        sse += r * r;
    }
    return sse;
}

ChiParams chi_mle(std::span<const double> x) {
    // y = x^2 is gamma(a = k / 2, theta = 2 s^2); solve ln a - digamma(a) = c.
    double mean_y = 0.0;
    double mean_log_y = 0.0;
    for (double v : x) {
        mean_y += v * v;
        mean_log_y += 2.0 * std::log(v);
    }
    mean_y /= static_cast<double>(x.size());
    mean_log_y /= static_cast<double>(x.size());
    const double c = std::log(mean_y) - mean_log_y;
    if (!(c > 0.0)) throw NumericalError("chi fit: samples are all equal, shape is unbounded");

    double a = (3.0 - c + std::sqrt((c - 3.0) * (c - 3.0) + 24.0 * c)) / (12.0 * c);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const double g = std::log(a) - special::digamma(a) - c;
        const double dg = 1.0 / a - special::trigamma(a);
        double next = a - g / dg;
        if (!(next > 0.0)) next = 0.5 * a;
        if (std::abs(next - a) <= 1e-13 * a) {
            a = next;
            converged = true;
            break;
        }
        a = next;
    }
    if (!converged) throw NumericalError("chi fit: maximum-likelihood iteration did not converge");
    const double k = 2.0 * a;
    return ChiParams{k, std::sqrt(mean_y / k)};
}

ChiParams chi_binned(const ChiParams& start, const std::vector<ChiBin>& bins) {
    std::vector<double> lo, hi, obs;
    for (const auto& b : bins) {
        lo.push_back(b.lo);
        hi.push_back(b.hi);
        obs.push_back(b.observed);
    }
    BinnedObjective objective{lo, hi, obs};

    gsl_multimin_function fn{&binned_sse, 2, &objective};
    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* step = gsl_vector_alloc(2);
    gsl_vector_set(x, 0, std::log(start.k));
    gsl_vector_set(x, 1, std::log(start.scale));
    gsl_vector_set_all(step, 0.1);
    gsl_multimin_fminimizer* solver =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(solver, &fn, x, step);

    int status = GSL_CONTINUE;
    for (int it = 0; it < 5000 && status == GSL_CONTINUE; ++it) {
        if (gsl_multimin_fminimizer_iterate(solver)) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-10);
    }
    const double k = std::exp(gsl_vector_get(solver->x, 0));
    const double s = std::exp(gsl_vector_get(solver->x, 1));
    gsl_multimin_fminimizer_free(solver);
    gsl_vector_free(step);
    gsl_vector_free(x);
    if (status != GSL_SUCCESS) throw NumericalError("chi fit: binned least squares did not converge");
    return ChiParams{k, s};
}

}  // namespace

double expected_volatility(const ReturnDistribution& dist, double coverage, double scale,
                           const QuadratureConfig& cfg) {
    if (!(coverage > 0.0 && coverage <= 1.0)) throw ValidationError("coverage p_N must be in (0, 1]");
    if (!(scale > 0.0 && std::isfinite(scale))) throw ValidationError("scale must be > 0");
    if (coverage == 1.0) {
        if (dist.is_normal()) return scale;
        if (!(dist.nu() > 2.0)) {
            throw ValidationError("full-range volatility diverges for nu <= 2; use p_N < 1");
        }
        return scale * std::sqrt(dist.nu() / (dist.nu() - 2.0));
    }
    const double xc = two_sided_critical(dist, coverage);
    const double m2 = integrate_second_moment(dist, Interval{-xc, xc}, cfg);
    return scale * std::sqrt(m2 / coverage);
}

double normalized_volatility(const ReturnDistribution& dist, double coverage,
                             const QuadratureConfig& cfg) {
    return expected_volatility(dist, coverage, 1.0, cfg) / expected_volatility(dist, 1.0, 1.0, cfg);
}

VolCurve normalized_vol_curve(std::span<const double> nu_grid, std::span<const double> coverages,
                              const QuadratureConfig& cfg) {
    VolCurve curve;
    curve.nu.assign(nu_grid.begin(), nu_grid.end());
    curve.coverage.assign(coverages.begin(), coverages.end());
    for (double p : coverages) {
        std::vector<double> row;
        for (double nu : nu_grid) row.push_back(normalized_volatility(ReturnDistribution::student_t(nu), p, cfg));
        curve.ratio.push_back(std::move(row));
    }
    return curve;
}

double trimmed_volatility(std::span<const double> window, int drop) {
    const std::array<int, 1> drops{drop};
    validate_drops(static_cast<int>(window.size()), drops);
    std::vector<double> scratch(window.begin(), window.end());
    std::sort(scratch.begin(), scratch.end());
    const auto half = static_cast<std::size_t>(drop / 2);
    return sorted_stddev(std::span<const double>(scratch.data() + half, scratch.size() - 2 * half));
}

WindowStudy window_volatilities(std::span<const double> returns, int window_len,
                                std::span<const int> drops) {
    return windows_impl(returns, window_len, drops, kParallel);
}

WindowStudy window_volatilities_serial(std::span<const double> returns, int window_len,
                                       std::span<const int> drops) {
    return windows_impl(returns, window_len, drops, kSerial);
}

WindowStudy simulate_window_study(const ReturnDistribution& dist, int window_len,
                                  std::span<const int> drops, int n_trials, std::uint64_t seed,
                                  double scale) {
    return simulate_impl(dist, window_len, drops, n_trials, seed, scale, kParallel);
}

WindowStudy simulate_window_study_serial(const ReturnDistribution& dist, int window_len,
                                         std::span<const int> drops, int n_trials,
                                         std::uint64_t seed, double scale) {
    return simulate_impl(dist, window_len, drops, n_trials, seed, scale, kSerial);
}

double ratio_uncertainty(double mean_a, double s_a, double mean_b, double s_b, double s_ab,
                         CovarianceForm form) {
    if (mean_a == 0.0 || !std::isfinite(mean_a)) throw ValidationError("ratio denominator A must be nonzero");
    const double a2 = mean_a * mean_a;
    const double positive = s_b * s_b / a2 + s_a * s_a * mean_b * mean_b / (a2 * a2);
    const double weight = form == CovarianceForm::Textbook ? 2.0 : 1.0;
    const double variance = positive - weight * mean_b / (a2 * mean_a) * s_ab;
    if (variance < -64.0 * std::numeric_limits<double>::epsilon() * positive) {
        throw NegativeVarianceError("ratio variance is negative (" + std::to_string(variance) +
                                    "): the covariance term exceeds the variance terms");
    }
    return 2.0 * std::sqrt(std::max(variance, 0.0));
}

std::vector<RatioObservation> volatility_ratios(const WindowStudy& study, CovarianceForm form) {
    const auto full = std::find(study.drop_counts.begin(), study.drop_counts.end(), 0);
    if (full == study.drop_counts.end()) throw ValidationError("volatility ratios need drop level 0");
    const std::size_t n = study.window_count();
    if (n < 2) throw ValidationError("volatility ratios need at least 2 windows");
    const auto& a = study.volatilities[static_cast<std::size_t>(full - study.drop_counts.begin())];
    const double mean_a = mean_of(a);
    if (mean_a == 0.0) {
        throw ValidationError("full-range volatility is zero in every window (constant series)");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<RatioObservation> out;
    for (std::size_t level = 0; level < study.drop_counts.size(); ++level) {
        const int drop = study.drop_counts[level];
        if (drop == 0) continue;
        const auto& b = study.volatilities[level];
        const double mean_b = mean_of(b);
        RatioObservation obs;
        obs.drop = drop;
        obs.coverage = static_cast<double>(study.window_len - drop) / study.window_len;
        obs.ratio = mean_b / mean_a;
        obs.uncertainty = ratio_uncertainty(mean_a, stddev_of(a) / root_n, mean_b,
                                            stddev_of(b) / root_n,
                                            covariance_of(a, b) / static_cast<double>(n), form);
        out.push_back(obs);
    }
    return out;
}

CalibrationCurve CalibrationCurve::truncated_pdf(std::vector<double> coverages,
                                                 const QuadratureConfig& cfg) {
    for (double p : coverages) {
        if (!(p > 0.0 && p < 1.0)) throw ValidationError("curve coverages must be in (0, 1)");
    }
    CalibrationCurve curve;
    curve.model_ = CurveModel::TruncatedPdf;
    curve.coverages_ = std::move(coverages);
    curve.u_max_ = 0.5;
    curve.cfg_ = cfg;
    return curve;
}

CalibrationCurve CalibrationCurve::finite_window(int window_len, std::vector<int> drops,
                                                 const FiniteWindowOptions& options) {
    if (options.grid_points < 3) throw ValidationError("finite-window curve needs >= 3 grid points");
    if (!(options.u_max > 0.0 && options.u_max < 1.0)) throw ValidationError("u_max must be in (0, 1)");
    if (options.max_degree < 2) throw ValidationError("polynomial degree must be >= 2");
    drops.erase(std::remove(drops.begin(), drops.end(), 0), drops.end());
    if (drops.empty()) throw ValidationError("finite-window curve needs a nonzero drop count");
    std::vector<int> all{0};
    all.insert(all.end(), drops.begin(), drops.end());
    validate_drops(window_len, all);

    std::vector<double> u;
    std::vector<std::vector<double>> y(drops.size());
    for (int g = 0; g < options.grid_points; ++g) {
        const double ug = options.u_max * g / (options.grid_points - 1);
        const WindowStudy study = simulate_window_study(from_u(ug), window_len, all,
                                                        options.windows_per_point, options.seed);
        u.push_back(ug);
        for (std::size_t j = 0; j < drops.size(); ++j) {
            y[j].push_back(study.summary[j + 1].mean / study.summary[0].mean);
        }
    }

    CalibrationCurve curve;
    curve.model_ = CurveModel::FiniteWindow;
    curve.u_max_ = options.u_max;
    for (std::size_t j = 0; j < drops.size(); ++j) {
        curve.coverages_.push_back(static_cast<double>(window_len - drops[j]) / window_len);
        std::vector<double> coeffs;
        for (int degree = std::min(options.max_degree, options.grid_points - 1); degree >= 2; --degree) {
            auto c = fit_polynomial(u, y[j], degree);
            if (nonincreasing(c, options.u_max)) {
                coeffs = std::move(c);
                break;
            }
        }
        if (coeffs.empty()) {
            throw NumericalError("finite-window curve for drop " + std::to_string(drops[j]) +
                                 " is not monotone; increase windows_per_point");
        }
        curve.poly_.push_back(std::move(coeffs));
    }
    return curve;
}

double CalibrationCurve::ratio_at_u(std::size_t level, double u) const {
    if (level >= coverages_.size()) throw ValidationError("curve level out of range");
    if (!(u >= 0.0 && u <= u_max_)) throw ValidationError("u = 1/nu outside the curve domain");
    if (model_ == CurveModel::FiniteWindow) return horner(poly_[level], u);
    // The full-range volatility diverges as nu -> 2, so the ratio tends to 0.
    if (u >= 0.5) return 0.0;
    return normalized_volatility(from_u(u), coverages_[level], cfg_);
}

double CalibrationCurve::ratio_at_nu(std::size_t level, double nu) const {
    if (!(nu > 0.0)) throw ValidationError("nu must be > 0");
    return ratio_at_u(level, std::isinf(nu) ? 0.0 : 1.0 / nu);
}

double CalibrationCurve::invert(std::size_t level, double ratio) const {
    const double top = asymptote(level);
    const double bottom = edge(level);
    if (!std::isfinite(ratio) || ratio > top + 1e-12) {
        throw NoSolutionError("volatility ratio " + std::to_string(ratio) +
                              " lies above the normal asymptote " + std::to_string(top) +
                              " for coverage " + std::to_string(coverages_[level]) +
                              ": no finite nu reproduces it");
    }
    if (ratio < bottom) {
        throw NoSolutionError("volatility ratio " + std::to_string(ratio) +
                              " lies below the curve's lower edge " + std::to_string(bottom) +
                              " (nu = " + std::to_string(1.0 / u_max_) + ")");
    }
    if (ratio >= top) return 0.0;
    double lo = 0.0;
    double hi = u_max_;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_at_u(level, mid) > ratio) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::size_t CalibrationCurve::level_for(double coverage) const {
    for (std::size_t j = 0; j < coverages_.size(); ++j) {
        if (std::abs(coverages_[j] - coverage) <= 1e-12) return j;
    }
    throw ValidationError("calibration curve has no branch for coverage " + std::to_string(coverage));
}

CalibrationResult estimate_nu_from_ratios(std::span<const RatioObservation> observations,
                                          const CalibrationCurve& curve) {
    if (observations.empty()) throw ValidationError("estimate_nu needs at least one nonzero drop level");

    CalibrationResult result;
    result.model = curve.model();
    std::vector<double> u_hat, sigma;
    for (const auto& obs : observations) {
        const std::size_t level = curve.level_for(obs.coverage);
        if (!(obs.uncertainty >= 0.0)) throw ValidationError("ratio uncertainty must be >= 0");
        const double u = curve.invert(level, obs.ratio);
        const double upper = obs.ratio + obs.uncertainty;
        const double lower = obs.ratio - obs.uncertainty;
        const double u_lo = upper >= curve.asymptote(level) ? 0.0 : curve.invert(level, upper);
        const double u_hi = lower <= curve.edge(level) ? curve.u_max() : curve.invert(level, lower);
        result.levels.push_back({obs, nu_from_u(u), nu_from_u(u_hi), nu_from_u(u_lo)});
        u_hat.push_back(u);
        sigma.push_back((u_hi - u_lo) / 4.0);
    }

    double u_c = 0.0;
    double sigma_c = 0.0;
    if (std::any_of(sigma.begin(), sigma.end(), [](double s) { return s == 0.0; })) {
        int exact = 0;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            if (sigma[j] == 0.0) {
                u_c += u_hat[j];
                ++exact;
            }
        }
        u_c /= exact;
    } else {
        double wsum = 0.0;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            const double w = 1.0 / (sigma[j] * sigma[j]);
            u_c += w * u_hat[j];
            sigma_c += w * sigma[j];
            wsum += w;
        }
        u_c /= wsum;
        sigma_c /= wsum;
    }
    result.nu_hat = nu_from_u(u_c);
    result.nu_hi = nu_from_u(std::max(0.0, u_c - 2.0 * sigma_c));
    result.nu_lo = nu_from_u(std::min(curve.u_max(), u_c + 2.0 * sigma_c));
    return result;
}

CalibrationResult estimate_nu(const WindowStudy& study, const CalibrationCurve& curve,
                              CovarianceForm form) {
    const auto ratios = volatility_ratios(study, form);
    return estimate_nu_from_ratios(ratios, curve);
}

CalibrationResult estimate_nu(const WindowStudy& study, const EstimateOptions& options) {
    const auto ratios = volatility_ratios(study, options.form);
    if (options.model == CurveModel::FiniteWindow) {
        std::vector<int> drops;
        for (const auto& r : ratios) drops.push_back(r.drop);
        const auto curve = CalibrationCurve::finite_window(study.window_len, drops, options.window);
        return estimate_nu_from_ratios(ratios, curve);
    }
    std::vector<double> coverages;
    for (const auto& r : ratios) coverages.push_back(r.coverage);
    const auto curve = CalibrationCurve::truncated_pdf(coverages);
    return estimate_nu_from_ratios(ratios, curve);
}

ChiFit fit_chi(std::span<const double> samples, ChiTarget target, ChiFitMethod method, int bins) {
    if (samples.size() < 30) throw ValidationError("chi fit needs at least 30 samples");
    std::vector<double> x;
    x.reserve(samples.size());
    for (double v : samples) {
        if (!(v > 0.0 && std::isfinite(v))) throw ValidationError("chi fit needs positive finite samples");
        x.push_back(target == ChiTarget::ReciprocalVolatility ? 1.0 / v : v);
    }
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());

    const int nbins = bins > 0 ? bins : static_cast<int>(std::ceil(2.0 * std::cbrt(n)));
    const double lo = x.front();
    const double hi = x.back();
    if (!(hi > lo)) throw NumericalError("chi fit: samples are all equal, shape is unbounded");
    const double width = (hi - lo) / nbins;

    ChiFit fit;
    fit.target = target;
    fit.method = method;
    std::vector<double> counts(static_cast<std::size_t>(nbins), 0.0);
    for (double v : x) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(b, counts.size() - 1)] += 1.0;
    }
    for (int b = 0; b < nbins; ++b) {
        ChiBin bin;
        bin.lo = lo + b * width;
        bin.hi = b + 1 == nbins ? hi : lo + (b + 1) * width;
        bin.observed = counts[static_cast<std::size_t>(b)] / (n * (bin.hi - bin.lo));
        fit.bins.push_back(bin);
    }

    fit.params = chi_mle(x);
    if (method == ChiFitMethod::BinnedLeastSquares) fit.params = chi_binned(fit.params, fit.bins);

    for (auto& bin : fit.bins) {
        bin.expected = binned_expected(fit.params, bin.lo, bin.hi);
        bin.residual = bin.observed - bin.expected;
        fit.sse += bin.residual * bin.residual;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = chi_cdf(fit.params, x[i]);
        fit.ks = std::max({fit.ks, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    for (int b = 0; b <= nbins; ++b) {
        const double edge = b == nbins ? hi : lo + b * width;
        const auto below = std::upper_bound(x.begin(), x.end(), edge) - x.begin();
        fit.cdf.push_back({edge, static_cast<double>(below) / n, chi_cdf(fit.params, edge)});
    }
    return fit;
}

}  // namespace gosset
