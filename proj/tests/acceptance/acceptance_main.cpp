// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gosset/calibration.hpp"
#include "gosset/distributions.hpp"
#include "gosset/errors.hpp"
#include "gosset/greeks.hpp"
#include "gosset/pricing.hpp"
#include "gosset/sampling.hpp"
#include "oracles.hpp"

using namespace gosset;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            if (failures_++ < 5) notes_ << " | " << what;
        }
    }
    void note(const std::string& s) { notes_ << " | " << s; }
    Outcome done() const {
        return {pass_, notes_.str() + (failures_ > 5 ? " | (" + std::to_string(failures_) + " failures)" : "")};
    }

private:
    bool pass_ = true;
    int failures_ = 0;
    std::ostringstream notes_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

ReturnDistribution t(double nu) { return ReturnDistribution::student_t(nu); }

TailPolicy policy(const ReturnDistribution& d, TailMode mode, double p_cap, double p_floor = 0.0) {
    return TailPolicy::from_probabilities(d, mode, p_floor, p_cap);
}

double call0(const ReturnDistribution& d, const TailPolicy& pol, const MarketParams& m,
             const QuadratureConfig& cfg = {}) {
    return price_call(d, pol, m, cfg).value_at_zero;
}

// 1. Critical values and cap factors.
Outcome critical_values() {
    Check c;
    const double nus[] = {3.0, 8.0, 21.0, oracle::kInf};
    const double xc_ref[] = {10.215, 4.501, 3.527, 3.090};
    const double cap_ref[] = {21.421, 3.858, 2.881, 2.527};
    for (int i = 0; i < 4; ++i) {
        const double xc = quantile(t(nus[i]), 0.999);
        const double cap = std::exp(0.3 * xc);
        c.expect(std::abs(xc - xc_ref[i]) <= 0.001, fmt("x_c(nu=%g)=%.5f", nus[i], xc));
        c.expect(std::abs(cap - cap_ref[i]) <= 0.005, fmt("cap(nu=%g)=%.4f", nus[i], cap));
    }
    return c.done();
}

// 2. Expected volatilities of the truncated density for 22-day windows.
Outcome expected_vols() {
    Check c;
    const double cov[] = {1.0, 20.0 / 22.0, 18.0 / 22.0};
    const double t3_ref[] = {1.73, 1.01, 0.816};
    const double n_ref[] = {1.73, 1.39, 1.18};
    const auto normal = ReturnDistribution::normal();
    for (int i = 0; i < 3; ++i) {
        const double v = expected_volatility(t(3.0), cov[i]);
        const double w = expected_volatility(normal, cov[i], std::sqrt(3.0));
        c.expect(std::abs(v - t3_ref[i]) <= 0.005, fmt("t3 vol(%.4f)=%.4f", cov[i], v));
        c.expect(std::abs(w - n_ref[i]) <= 0.005, fmt("normal vol(%.4f)=%.4f", cov[i], w));
    }
    const double norm_ref[] = {0.584, 0.471, 0.803, 0.683};
    const double got[] = {normalized_volatility(t(3.0), cov[1]), normalized_volatility(t(3.0), cov[2]),
                          normalized_volatility(normal, cov[1]), normalized_volatility(normal, cov[2])};
    for (int i = 0; i < 4; ++i) c.expect(std::abs(got[i] - norm_ref[i]) <= 0.002, fmt("normalized=%.4f", got[i]));
    return c.done();
}

// 3. Simulated 22-day window volatilities, seed 42.
Outcome simulation() {
    Check c;
    const int drops[] = {0, 2, 4};
    const auto ts = simulate_window_study(t(3.0), 22, drops, 1000, 42);
    const auto ns = simulate_window_study(ReturnDistribution::normal(), 22, drops, 1000, 42, std::sqrt(3.0));
    const auto& a = ts.summary.front();
    const auto& b = ns.summary.front();
    c.expect(std::abs(a.median - 1.48) <= 0.10, fmt("t3 median=%.3f", a.median));
    c.expect(std::abs(a.stddev - 0.65) <= 0.12, fmt("t3 s=%.3f", a.stddev));
    c.expect(std::abs(a.mean - 1.61) <= 0.10, fmt("t3 mean=%.3f", a.mean));
    c.expect(std::abs(b.median - 1.70) <= 0.06, fmt("normal median=%.3f", b.median));
    c.note(fmt("seed 42: t3 mean %.3f median %.3f s %.3f", a.mean, a.median, a.stddev) +
           fmt(", normal median %.3f", b.median));
    return c.done();
}

// 4. Large-nu, nearly untruncated prices against Black-Scholes.
Outcome black_scholes_limit() {
    Check c;
    const auto d = t(1e5);
    const double p_cap = 1.0 - 1e-10;
    double worst = 0.0;
    for (TailMode mode : {TailMode::Capped, TailMode::Truncated}) {
        const auto pol = policy(d, mode, p_cap);
        for (int i = 0; i < 50; ++i) {
            const double k = 2.0 * (i + 1);
            const MarketParams m{50.0, k, 0.03, 0.3};
            const double dc = std::abs(call0(d, pol, m) - oracle::bs_call(50.0, k, 0.03, 0.3));
            const double dp = std::abs(price_put(d, pol, m).value_at_zero - oracle::bs_put(50.0, k, 0.03, 0.3));
            worst = std::max({worst, dc, dp});
            c.expect(dc <= 1e-4 * 50.0 && dp <= 1e-4 * 50.0, fmt("K=%g call diff %.3g put diff %.3g", k, dc, dp));
        }
    }
    c.note(fmt("max |diff| %.3g", worst));
    return c.done();
}

// 5. Put-call parity on a random grid.
Outcome parity() {
    Check c;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> nu_u(2.1, 50.0), lpc(std::log10(1e-5), std::log10(1e-2)),
        sig_u(0.05, 0.6), k_u(0.0, 120.0), rt_u(0.0, 0.1), s_u(20.0, 100.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double nu = nu_u(rng), p_cap = 1.0 - std::pow(10.0, lpc(rng)), sigma = sig_u(rng);
        const double s0 = s_u(rng), k = k_u(rng), rt = rt_u(rng);
        const auto d = t(nu);
        const MarketParams m{s0, k, rt, sigma};
        for (TailMode mode : {TailMode::Capped, TailMode::Truncated}) {
            const auto pol = policy(d, mode, p_cap);
            const double gap = call0(d, pol, m) - price_put(d, pol, m).value_at_zero - (s0 - k * std::exp(-rt));
            worst = std::max(worst, std::abs(gap) / s0);
            c.expect(std::abs(gap) <= 1e-8 * s0, fmt("nu=%.3f sigma=%.3f gap=%.3g", nu, sigma, gap));
        }
    }
    c.note(fmt("max |gap|/S0 %.3g", worst));
    return c.done();
}

// 6. Truncated t(3) call against a conditioned Monte Carlo estimate.
Outcome monte_carlo() {
    Check c;
    const auto d = t(3.0);
    const auto pol = policy(d, TailMode::Truncated, 0.999);
    std::uint64_t seed = 600;
    for (double k : {30.0, 50.0, 70.0}) {
        const double exact = call0(d, pol, MarketParams{50.0, k, 0.03, 0.3});
        const auto mc = oracle::mc_truncated_call(3.0, 0.999, 50.0, k, 0.03, 0.3, 10'000'000, seed++);
        const double z = (exact - mc.value) / mc.se;
        c.expect(std::abs(z) <= 4.0, fmt("K=%g z=%.2f", k, z));
        c.note(fmt("K=%g C0=%.5f z=%.2f", k, exact, z));
    }
    return c.done();
}

// 7. Analytic greeks against finite differences of the price.
Outcome greeks_fd() {
    Check c;
    QuadratureConfig fine;
    fine.rel_tol = 1e-13;
    fine.abs_tol = 1e-15;
    fine.max_subdivisions = 2000;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> s_u(35.0, 65.0), nu_u(2.5, 30.0);
    const double pcs[] = {0.99, 0.999, 0.9999};
    const double sigmas[] = {0.1, 0.2, 0.3};
    double wd = 0.0, wg = 0.0, wv = 0.0;
    for (int i = 0; i < 36; ++i) {
        const double nu = i < 18 ? 3.0 : nu_u(rng);
        const double p_cap = pcs[i % 3];
        const double sigma = sigmas[(i / 3) % 3];
        const double s0 = s_u(rng);
        const auto d = t(nu);
        for (TailMode mode : {TailMode::Capped, TailMode::Truncated}) {
            const auto pol = policy(d, mode, p_cap);
            const MarketParams m{s0, 49.0, 0.03, sigma};
            const auto at = [&](double s, double sg) { return call0(d, pol, MarketParams{s, 49.0, 0.03, sg}, fine); };
            // Central first differences at 1e-5 relative; the second difference needs a wider step.
            const double hd = 1e-5 * s0;
            const double fd_delta = (at(s0 + hd, sigma) - at(s0 - hd, sigma)) / (2.0 * hd);
            const double h = 1e-3 * s0;
            const double fd_gamma = (at(s0 + h, sigma) - 2.0 * at(s0, sigma) + at(s0 - h, sigma)) / (h * h);
            const double hv = 1e-5 * sigma;
            const double fd_vega = (at(s0, sigma + hv) - at(s0, sigma - hv)) / (2.0 * hv);
            const double delta = call_delta(d, pol, m, fine);
            const double gamma = call_gamma(d, pol, m, fine);
            const double vega = call_vega(d, pol, m, fine);
            const double rd = std::abs(delta - fd_delta) / std::abs(fd_delta);
            const double rg = std::abs(gamma - fd_gamma) / std::abs(fd_gamma);
            const double rv = std::abs(vega - fd_vega) / std::abs(fd_vega);
            wd = std::max(wd, rd);
            wg = std::max(wg, rg);
            wv = std::max(wv, rv);
            const std::string where = fmt("nu=%.2f p=%.4f sigma=%.1f", nu, p_cap, sigma);
            c.expect(rd <= 1e-5, where + fmt(" delta rel %.2g", rd));
            c.expect(rg <= 1e-4, where + fmt(" gamma rel %.2g", rg));
            c.expect(rv <= 1e-4, where + fmt(" vega rel %.2g", rv));
        }
    }
    c.note(fmt("max rel: delta %.2g gamma %.2g vega %.2g", wd, wg, wv));
    return c.done();
}

// 8. Qualitative orderings of prices and greeks.
Outcome orderings() {
    Check c;
    for (double nu : {3.0, 8.0, 21.0}) {
        const auto d = t(nu);
        const auto cap = policy(d, TailMode::Capped, 0.999);
        const auto tr = policy(d, TailMode::Truncated, 0.999);
        for (int i = 0; i <= 100; ++i) {
            const MarketParams m{50.0, static_cast<double>(i), 0.03, 0.3};
            c.expect(call0(d, cap, m) >= call0(d, tr, m), fmt("nu=%g K=%d capped < truncated", nu, i));
        }
    }
    const MarketParams atm{50.0, 49.0, 0.03, 0.3};
    std::vector<double> vegas, thetas;
    for (double nu : {3.0, 8.0, 21.0, 40.0}) {
        const auto d = t(nu);
        const auto pol = policy(d, TailMode::Truncated, 0.999);
        vegas.push_back(call_vega(d, pol, atm));
        thetas.push_back(theta_numeric(d, pol, atm));
    }
    vegas.push_back(black_scholes_call_greeks(atm).vega);
    thetas.push_back(oracle::bs_call(50.0, 49.0, 0.03 * 366.0 / 365.0, 0.3 * std::sqrt(366.0 / 365.0)) -
                     oracle::bs_call(50.0, 49.0, 0.03, 0.3));
    for (std::size_t i = 0; i + 1 < vegas.size(); ++i) {
        c.expect(vegas[i] > vegas[i + 1], fmt("vega not decreasing in nu at step %g: %.5f vs %.5f", double(i), vegas[i], vegas[i + 1]));
        c.expect(thetas[i] > thetas[i + 1], fmt("theta not decreasing in nu at step %g: %.6f vs %.6f", double(i), thetas[i], thetas[i + 1]));
    }
    const auto big = t(1e5);
    const auto pol = policy(big, TailMode::Truncated, 0.999);
    const double dnu = dprice_dnu(big, pol, atm);
    const double dnu3 = dprice_dnu(t(3.0), policy(t(3.0), TailMode::Truncated, 0.999), atm);
    c.expect(std::abs(dnu) <= 1e-6 * 50.0, fmt("dC/dnu(1e5)=%.3g", dnu));
    c.expect(std::abs(dnu) < 1e-4 * std::abs(dnu3), fmt("dC/dnu(1e5)=%.3g vs nu=3 %.3g", dnu, dnu3));
    for (double k : {60.0, 70.0, 80.0}) {
        const MarketParams m{50.0, k, 0.03, 0.3};
        double prev = 0.0;
        for (double nu : {21.0, 8.0, 3.0}) {
            const auto d = t(nu);
            const double v = call0(d, policy(d, TailMode::Truncated, 0.999), m);
            c.expect(v > prev, fmt("K=%g OTM call not increasing as nu falls to %g", k, nu));
            prev = v;
        }
    }
    c.note(fmt("vega nu=3 %.4f, BS %.4f; dC/dnu(1e5) %.2g", vegas.front(), vegas.back(), dnu));
    return c.done();
}

// 9. Synthetic calibration round trip with the finite-window curve.
Outcome calibration() {
    Check c;
    const int window = 44;
    const int drops[] = {0, 4, 8};
    const auto curve = CalibrationCurve::finite_window(window, {4, 8});
    const auto pdf_curve = CalibrationCurve::truncated_pdf({40.0 / 44.0, 36.0 / 44.0});
    for (double nu0 : {4.0, 8.0, 16.0}) {
        int hits = 0, pdf_hits = 0;
        for (int k = 0; k < 20; ++k) {
            const auto xs = sample_returns(t(nu0), 500 * window, 1000 + k);
            const auto study = window_volatilities(xs, window, drops);
            try {
                const auto r = estimate_nu(study, curve);
                hits += (r.nu_lo <= nu0 && nu0 <= r.nu_hi);
            } catch (const NumericalError&) {
            }
            try {
                const auto r = estimate_nu(study, pdf_curve);
                pdf_hits += (r.nu_lo <= nu0 && nu0 <= r.nu_hi);
            } catch (const NumericalError&) {
            }
        }
        c.expect(hits >= 18, fmt("nu0=%g coverage %g/20", nu0, hits));
        c.note(fmt("nu0=%g: %g/20 (truncated-pdf curve %g/20)", nu0, hits, pdf_hits));
    }
    return c.done();
}

// 10. Chi fits on synthetic chi and inverse-chi data.
Outcome chi_fit() {
    Check c;
    const ChiParams truth{5.0, 2.0};
    const auto xs = sample_chi(truth, 100000, 3);
    for (ChiFitMethod method : {ChiFitMethod::MaximumLikelihood, ChiFitMethod::BinnedLeastSquares}) {
        const auto f = fit_chi(xs, ChiTarget::Volatility, method);
        const char* name = method == ChiFitMethod::MaximumLikelihood ? "mle" : "lsq";
        c.expect(std::abs(f.params.k / 5.0 - 1.0) <= 0.05, std::string(name) + fmt(" k=%.4f", f.params.k));
        c.expect(std::abs(f.params.scale / 2.0 - 1.0) <= 0.05, std::string(name) + fmt(" scale=%.4f", f.params.scale));
        c.note(std::string(name) + fmt(" k=%.3f scale=%.3f", f.params.k, f.params.scale));
    }
    const auto ys = sample_inverse_chi(ChiParams{21.0, 1.0}, 100000, 4);
    const auto g = fit_chi(ys, ChiTarget::Volatility);
    std::vector<double> sorted(ys);
    std::sort(sorted.begin(), sorted.end());
    const double tail_start = sorted[sorted.size() * 9 / 10];
    double tail = 0.0;
    for (const auto& b : g.bins)
        if (b.lo >= tail_start) tail += b.residual * (b.hi - b.lo);
    c.expect(tail > 0.0, fmt("right-tail residual %.4g", tail));
    c.note(fmt("inverse-chi right-tail residual mass %+.4f", tail));
    return c.done();
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"critical values and cap factors", critical_values},
        {"expected volatility of the truncated density", expected_vols},
        {"simulated 22-day window volatilities", simulation},
        {"Black-Scholes limit", black_scholes_limit},
        {"put-call parity", parity},
        {"Monte Carlo price oracle", monte_carlo},
        {"greeks against finite differences", greeks_fd},
        {"qualitative orderings", orderings},
        {"calibration round trip", calibration},
        {"chi fit self-consistency", chi_fit},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string(" | exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("[%s] %zu %s (%.2fs)%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
