#include "cli_app.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gosset/calibration.hpp"
#include "gosset/errors.hpp"
#include "gosset/ingest.hpp"
#include "gosset/kernels.hpp"
#include "table_output.hpp"

namespace gosset::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ValidationError("cannot parse " + what + " '" + text + "'");
    }
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw ValidationError("empty list '" + text + "'");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ValidationError("cannot parse integer '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

enum class ModeSel { Both, Capped, Truncated };

struct ModelFlags {
    std::optional<std::string> nu;
    std::string nus;
    std::string mode = "both";
    double pp = 0.0;
    double pc = 0.999;
    std::optional<double> s0;
    std::optional<double> strike;
    double rt = 0.03;
    double sigma = 0.3;
    std::string sweep;
    std::string format = "csv";
};

struct CalibrateFlags {
    std::string input;
    std::string input_format = "closes";
    std::string column;
    std::string delimiter;
    std::vector<int> windows;
    std::string drops;
    std::string curve = "pdf";
    std::string covariance = "printed";
    std::uint64_t seed = FiniteWindowOptions{}.seed;
    int trials = FiniteWindowOptions{}.windows_per_point;
    std::string format = "csv";
};

struct SimulateFlags {
    std::string nu = "3";
    double scale = 1.0;
    int window = 22;
    std::string drops = "0,2,4";
    int trials = 1000;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
};

Format parse_format(const std::string& text) {
    const std::string f = lower(text);
    if (f == "csv") return Format::Csv;
    if (f == "json") return Format::Json;
    throw ValidationError("--format must be csv or json, got '" + text + "'");
}

ModeSel parse_mode(const std::string& text) {
    const std::string m = lower(text);
    if (m == "both") return ModeSel::Both;
    if (m == "capped") return ModeSel::Capped;
    if (m == "truncated") return ModeSel::Truncated;
    throw ValidationError("--mode must be capped, truncated or both, got '" + text + "'");
}

// --nus wins, then --nu, then the command's default list.
std::vector<double> model_nus(const ModelFlags& f, const std::string& fallback) {
    if (f.nus.empty() && f.nu) return {parse_nu(*f.nu)};
    std::vector<double> out;
    for (const auto& item : split_list(f.nus.empty() ? fallback : f.nus)) out.push_back(parse_nu(item));
    return out;
}

// Expands the model flags into grid points in (nu, sweep value) order.
struct Grid {
    std::string param;
    std::vector<double> param_values;
    std::vector<double> nu_values;
    std::vector<ModelPoint> points;
};

Grid build_grid(const ModelFlags& f, const std::string& default_sweep,
                const std::string& default_nus, double default_s0, double default_strike) {
    Sweep sweep;
    if (!f.sweep.empty()) {
        sweep = parse_sweep(f.sweep);
    } else {
        const Sweep fallback = parse_sweep(default_sweep);
        const bool pinned = (fallback.param == "K" && f.strike) || (fallback.param == "S0" && f.s0);
        sweep = pinned ? Sweep{fallback.param, fallback.param == "K" ? *f.strike : *f.s0,
                               fallback.param == "K" ? *f.strike : *f.s0, 1}
                       : fallback;
    }
    Grid grid;
    grid.param = sweep.param;
    grid.param_values = sweep.values();
    if (sweep.param == "nu") {
        if (!f.nus.empty() || f.nu) throw ValidationError("--nu/--nus cannot be combined with a nu sweep");
        grid.nu_values = {kInf};  // replaced by the swept value at each point
    } else {
        grid.nu_values = model_nus(f, default_nus);
    }
    for (double nu : grid.nu_values) {
        for (double v : grid.param_values) {
            double s0 = f.s0.value_or(default_s0);
            double k = f.strike.value_or(default_strike);
            double sigma = f.sigma;
            double pc = f.pc;
            double shape = nu;
            if (sweep.param == "S0") s0 = v;
            if (sweep.param == "K") k = v;
            if (sweep.param == "sigma") sigma = v;
            if (sweep.param == "p") pc = v;
            if (sweep.param == "nu") shape = v;
            grid.points.push_back({ReturnDistribution::student_t(shape), f.pp, pc,
                                   MarketParams{s0, k, f.rt, sigma}});
        }
    }
    return grid;
}

std::vector<Cell> lead_cells(const Grid& grid, std::size_t i) {
    const ModelPoint& pt = grid.points[i];
    const double v = grid.param_values[i % grid.param_values.size()];
    if (grid.param == "nu") return {v};
    return {v, pt.dist.nu()};
}

std::vector<std::string> lead_columns(const Grid& grid) {
    if (grid.param == "nu") return {"nu"};
    return {grid.param, "nu"};
}

Table price_table(const ModelFlags& f, const std::string& default_nus) {
    const ModeSel mode = parse_mode(f.mode);
    const Grid grid = build_grid(f, "K:0:100:101", default_nus.empty() ? "3" : default_nus, 50.0, 49.0);
    const auto rows = price_grid(grid.points);

    Table t{"prices", lead_columns(grid), {}};
    const bool capped = mode != ModeSel::Truncated;
    const bool truncated = mode != ModeSel::Capped;
    if (capped) t.columns.push_back("call_capped");
    if (truncated) t.columns.push_back("call_truncated");
    if (capped) t.columns.push_back("put_capped");
    if (truncated) t.columns.push_back("put_truncated");
    t.columns.insert(t.columns.end(), {"black_scholes_call", "black_scholes_put"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = lead_cells(grid, i);
        const PriceRow& r = rows[i];
        if (capped) row.push_back(r.call_capped);
        if (truncated) row.push_back(r.call_truncated);
        if (capped) row.push_back(r.put_capped);
        if (truncated) row.push_back(r.put_truncated);
        row.push_back(r.black_scholes_call);
        row.push_back(r.black_scholes_put);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void greeks_columns(std::vector<std::string>& cols, const std::string& suffix) {
    for (const char* name : {"delta", "gamma", "vega", "theta", "dC_dnu", "dC_dp", "fd_delta",
                             "fd_gamma", "fd_vega"}) {
        cols.push_back(std::string(name) + "_" + suffix);
    }
}

void greeks_cells(std::vector<Cell>& row, const GreeksReport& g, const BlackScholesGreeks& fd) {
    row.insert(row.end(), {g.delta, g.gamma, g.vega, g.theta, g.dC_dnu, g.dC_dp, fd.delta, fd.gamma,
                           fd.vega});
}

Table greeks_table(const ModelFlags& f) {
    const ModeSel mode = parse_mode(f.mode);
    const Grid grid = build_grid(f, "S0:25:75:51", "3", 50.0, 49.0);
    const auto rows = greeks_grid(grid.points);

    Table t{"greeks", lead_columns(grid), {}};
    const bool capped = mode != ModeSel::Truncated;
    const bool truncated = mode != ModeSel::Capped;
    if (capped) greeks_columns(t.columns, "capped");
    if (truncated) greeks_columns(t.columns, "truncated");
    t.columns.insert(t.columns.end(),
                     {"black_scholes_delta", "black_scholes_gamma", "black_scholes_vega"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = lead_cells(grid, i);
        const GreeksRow& r = rows[i];
        if (capped) greeks_cells(row, r.capped, r.fd_capped);
        if (truncated) greeks_cells(row, r.truncated, r.fd_truncated);
        row.insert(row.end(), {r.black_scholes.delta, r.black_scholes.gamma, r.black_scholes.vega});
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table table1(const ModelFlags& f) {
    Table t{"critical_values", {"nu", "p", "x_c", "cap_factor"}, {}};
    for (double nu : model_nus(f, "3,8,21,inf")) {
        const auto dist = ReturnDistribution::student_t(nu);
        const double xc = quantile(dist, f.pc);
        t.rows.push_back({nu, f.pc, xc, std::exp(f.sigma * xc)});
    }
    return t;
}

std::vector<int> default_drops(int window) {
    const int step = 2 * std::max(1, static_cast<int>(std::lround(window / 22.0)));
    return {0, step, 2 * step};
}

SeriesFormat parse_series_format(const std::string& text) {
    const std::string f = lower(text);
    if (f == "closes") return SeriesFormat::Closes;
    if (f == "returns") return SeriesFormat::Returns;
    throw ValidationError("--input-format must be closes or returns, got '" + text + "'");
}

char parse_delimiter(const std::string& text, const std::string& path) {
    if (text.empty()) {
        const bool tsv = path.size() >= 4 && lower(path.substr(path.size() - 4)) == ".tsv";
        return tsv ? '\t' : ',';
    }
    if (text == "tab" || text == "\\t") return '\t';
    if (text.size() == 1) return text[0];
    throw ValidationError("--delimiter must be a single character or 'tab'");
}

const char* model_name(CurveModel m) { return m == CurveModel::FiniteWindow ? "window" : "pdf"; }

std::vector<Table> calibrate(const CalibrateFlags& f, std::ostream& err) {
    ColumnMap columns;
    if (!f.column.empty()) {
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(f.column.data(), f.column.data() + f.column.size(), index);
        if (ec == std::errc{} && ptr == f.column.data() + f.column.size()) {
            columns.value_index = index;
        } else {
            columns.value_name = f.column;
        }
    }
    const auto series = load_series(f.input, parse_series_format(f.input_format),
                                    parse_delimiter(f.delimiter, f.input), columns);

    CurveModel model = CurveModel::TruncatedPdf;
    if (lower(f.curve) == "window") {
        model = CurveModel::FiniteWindow;
    } else if (lower(f.curve) != "pdf") {
        throw ValidationError("--curve must be pdf or window, got '" + f.curve + "'");
    }
    CovarianceForm form = CovarianceForm::AsPrinted;
    if (lower(f.covariance) == "textbook") {
        form = CovarianceForm::Textbook;
    } else if (lower(f.covariance) != "printed") {
        throw ValidationError("--covariance must be printed or textbook, got '" + f.covariance + "'");
    }
    FiniteWindowOptions window_options;
    window_options.seed = f.seed;
    window_options.windows_per_point = f.trials;

    Table levels{"levels",
                 {"window", "drop", "coverage", "windows", "mean", "median", "s", "ratio",
                  "uncertainty", "nu_hat", "nu_lo", "nu_hi"},
                 {}};
    Table estimates{"estimates", {"window", "model", "nu_hat", "nu_lo", "nu_hi"}, {}};
    Table curve_table{"curve", {"window", "coverage", "nu", "ratio"}, {}};
    const std::vector<double> curve_nus{2.25, 2.5, 3, 3.5, 4, 5, 6, 8, 10, 13, 16,
                                        20, 25, 30, 40, 50, 75, 100, kInf};

    const std::vector<int> windows = f.windows.empty() ? std::vector<int>{22} : f.windows;
    for (int window : windows) {
        const std::vector<int> drops = f.drops.empty() ? default_drops(window) : parse_int_list(f.drops);
        const auto study = window_volatilities(series.returns, window, drops);
        if (!study.zero_variance_windows.empty()) {
            err << "warning: " << study.zero_variance_windows.size() << " of " << study.window_count()
                << " windows of length " << window << " have zero variance\n";
        }
        const auto ratios = volatility_ratios(study, form);
        std::vector<double> coverages;
        std::vector<int> nonzero;
        for (const auto& r : ratios) {
            coverages.push_back(r.coverage);
            nonzero.push_back(r.drop);
        }
        const auto curve = model == CurveModel::FiniteWindow
                               ? CalibrationCurve::finite_window(window, nonzero, window_options)
                               : CalibrationCurve::truncated_pdf(coverages);
        const auto result = estimate_nu_from_ratios(ratios, curve);

        for (std::size_t level = 0; level < study.drop_counts.size(); ++level) {
            const DropSummary& s = study.summary[level];
            std::vector<Cell> row{static_cast<long long>(window), static_cast<long long>(s.drop),
                                  static_cast<double>(window - s.drop) / window,
                                  static_cast<long long>(study.window_count()), s.mean, s.median,
                                  s.stddev};
            const auto it = std::find_if(result.levels.begin(), result.levels.end(),
                                         [&](const LevelEstimate& e) { return e.observation.drop == s.drop; });
            if (it == result.levels.end()) {
                row.insert(row.end(), {1.0, 0.0, std::string(), std::string(), std::string()});
            } else {
                row.insert(row.end(), {it->observation.ratio, it->observation.uncertainty, it->nu_hat,
                                       it->nu_lo, it->nu_hi});
            }
            levels.rows.push_back(std::move(row));
        }
        estimates.rows.push_back({static_cast<long long>(window), std::string(model_name(model)),
                                  result.nu_hat, result.nu_lo, result.nu_hi});
        for (std::size_t level = 0; level < curve.levels(); ++level) {
            for (double nu : curve_nus) {
                curve_table.rows.push_back({static_cast<long long>(window), curve.coverage(level), nu,
                                            curve.ratio_at_nu(level, nu)});
            }
        }
    }
    return {estimates, levels, curve_table};
}

Table simulate(const SimulateFlags& f) {
    if (!f.seed) throw ValidationError("simulate requires --seed");
    const auto dist = ReturnDistribution::student_t(parse_nu(f.nu));
    const auto drops = parse_int_list(f.drops);
    const auto study = simulate_window_study(dist, f.window, drops, f.trials, *f.seed, f.scale);
    Table t{"simulation", {"N", "drop", "mean", "s", "median", "expected"}, {}};
    for (const auto& s : study.summary) {
        const double coverage = static_cast<double>(f.window - s.drop) / f.window;
        double expected = std::numeric_limits<double>::quiet_NaN();
        if (coverage < 1.0 || dist.is_normal() || dist.nu() > 2.0) {
            expected = expected_volatility(dist, coverage, f.scale);
        }
        t.rows.push_back({static_cast<long long>(f.window - s.drop), static_cast<long long>(s.drop),
                          s.mean, s.stddev, s.median, expected});
    }
    return t;
}

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_market, const std::string& nus_help) {
    cmd->add_option("--nu", f.nu, "Shape parameter: decimal > 0 or 'inf' (default 3)");
    cmd->add_option("--nus", f.nus, nus_help);
    cmd->add_option("--pc", f.pc, "Cap probability p_c")->capture_default_str();
    cmd->add_option("--sigma", f.sigma, "Volatility to expiry sigma_T")->capture_default_str();
    cmd->add_option("--format", f.format, "csv or json")->capture_default_str();
    if (!with_market) return;
    cmd->add_option("--mode", f.mode, "capped, truncated or both")->capture_default_str();
    cmd->add_option("--pp", f.pp, "Floor probability p_p")->capture_default_str();
    cmd->add_option("--s0", f.s0, "Spot price S0 (default 50)");
    cmd->add_option("--strike", f.strike, "Strike K (default 49)");
    cmd->add_option("--rt", f.rt, "Risk-free rate times time to expiry")->capture_default_str();
    cmd->add_option("--sweep", f.sweep, "param:lo:hi:steps with param in S0, K, sigma, nu, p");
}

}  // namespace

double parse_nu(const std::string& text) {
    const std::string t = lower(text);
    if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
    const double v = parse_double(text, "nu");
    if (!(v > 0.0)) throw ValidationError("nu must be > 0, got '" + text + "'");
    return v;
}

std::vector<double> Sweep::values() const {
    std::vector<double> out;
    for (int i = 0; i < steps; ++i) {
        out.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    }
    return out;
}

Sweep parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) throw ValidationError("--sweep expects param:lo:hi:steps, got '" + text + "'");
    Sweep s;
    const std::string p = lower(parts[0]);
    if (p == "s0") {
        s.param = "S0";
    } else if (p == "k") {
        s.param = "K";
    } else if (p == "sigma" || p == "nu" || p == "p") {
        s.param = p;
    } else {
        throw ValidationError("sweep parameter must be S0, K, sigma, nu or p, got '" + parts[0] + "'");
    }
    s.lo = parse_double(parts[1], "sweep lower bound");
    s.hi = parse_double(parts[2], "sweep upper bound");
    const double steps = parse_double(parts[3], "sweep step count");
    if (!(steps >= 1.0 && steps <= 1e6 && steps == std::floor(steps))) {
        throw ValidationError("sweep step count must be a positive integer");
    }
    s.steps = static_cast<int>(steps);
    if (s.hi < s.lo) throw ValidationError("sweep requires lo <= hi");
    return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"European option pricing with Student's t returns and capped or truncated tails"};
    app.name("gosset");
    app.require_subcommand(1);

    ModelFlags price_flags, curve_flags, greeks_flags, table_flags;
    CalibrateFlags cal_flags;
    SimulateFlags sim_flags;

    auto* price_cmd = app.add_subcommand("price", "Call and put prices under both tail modes");
    add_model_flags(price_cmd, price_flags, true, "Comma-separated list of nu values");
    auto* curve_cmd = app.add_subcommand("curve", "Price-vs-strike curves for several nu");
    add_model_flags(curve_cmd, curve_flags, true, "Comma-separated nu values (default 3,8,21,inf)");
    auto* greeks_cmd = app.add_subcommand("greeks", "Call greeks under both tail modes");
    add_model_flags(greeks_cmd, greeks_flags, true, "Comma-separated list of nu values");
    auto* table_cmd = app.add_subcommand("table1", "Critical values and maximum asset increase");
    add_model_flags(table_cmd, table_flags, false, "Comma-separated nu values (default 3,8,21,inf)");

    auto* cal_cmd = app.add_subcommand("calibrate", "Estimate nu from a price or return series");
    cal_cmd->add_option("--input", cal_flags.input, "Delimited file with a header row")->required();
    cal_cmd->add_option("--input-format", cal_flags.input_format, "closes or returns")->capture_default_str();
    cal_cmd->add_option("--column", cal_flags.column, "Value column name or 0-based index");
    cal_cmd->add_option("--delimiter", cal_flags.delimiter, "Field delimiter (default by extension)");
    cal_cmd->add_option("--window", cal_flags.windows, "Window length; repeat for several (default 22)");
    cal_cmd->add_option("--drops", cal_flags.drops, "Comma-separated total drop counts (default 0,N/11,2N/11)");
    cal_cmd->add_option("--curve", cal_flags.curve, "pdf or window")->capture_default_str();
    cal_cmd->add_option("--covariance", cal_flags.covariance, "printed or textbook")->capture_default_str();
    cal_cmd->add_option("--seed", cal_flags.seed, "Seed for the window curve")->capture_default_str();
    cal_cmd->add_option("--trials", cal_flags.trials, "Windows per grid point for the window curve")
        ->capture_default_str();
    cal_cmd->add_option("--format", cal_flags.format, "csv or json")->capture_default_str();

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo window volatility study");
    sim_cmd->add_option("--nu", sim_flags.nu, "Shape parameter: decimal > 0 or 'inf'")->capture_default_str();
    sim_cmd->add_option("--scale", sim_flags.scale, "Scale applied to each draw")->capture_default_str();
    sim_cmd->add_option("--window", sim_flags.window, "Window length N")->capture_default_str();
    sim_cmd->add_option("--drops", sim_flags.drops, "Comma-separated total drop counts")->capture_default_str();
    sim_cmd->add_option("--trials", sim_flags.trials, "Number of windows")->capture_default_str();
    sim_cmd->add_option("--seed", sim_flags.seed, "Random seed (required)");
    sim_cmd->add_option("--format", sim_flags.format, "csv or json")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*price_cmd) {
            const Format fmt = parse_format(price_flags.format);
            write_tables(out, {price_table(price_flags, "")}, fmt);
        } else if (*curve_cmd) {
            const Format fmt = parse_format(curve_flags.format);
            write_tables(out, {price_table(curve_flags, "3,8,21,inf")}, fmt);
        } else if (*greeks_cmd) {
            const Format fmt = parse_format(greeks_flags.format);
            write_tables(out, {greeks_table(greeks_flags)}, fmt);
        } else if (*table_cmd) {
            const Format fmt = parse_format(table_flags.format);
            write_tables(out, {table1(table_flags)}, fmt);
        } else if (*cal_cmd) {
            const Format fmt = parse_format(cal_flags.format);
            write_tables(out, calibrate(cal_flags, err), fmt);
        } else {
            const Format fmt = parse_format(sim_flags.format);
            write_tables(out, {simulate(sim_flags)}, fmt);
        }
        return kExitOk;
    } catch (const NoSolutionError& e) {
        err << "error: no solution: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "error: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace gosset::cli
