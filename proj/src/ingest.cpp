#include "gosset/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "gosset/errors.hpp"

namespace gosset {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    if (e - b >= 2 && s[b] == '"' && s[e - 1] == '"') {
        ++b;
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(delimiter, start);
        fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
    const std::string key = lower(name);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (lower(header[i]) == key) return i;
    }
    return std::nullopt;
}

bool parse_number(const std::string& field, double& out) {
    const char* first = field.data();
    const char* last = first + field.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{std::stoi(s.substr(0, 4))},
                                          std::chrono::month{static_cast<unsigned>(std::stoi(s.substr(5, 2)))},
                                          std::chrono::day{static_cast<unsigned>(std::stoi(s.substr(8, 2)))}};
    return ymd.ok();
}

}  // namespace

std::vector<double> log_returns(std::span<const double> closes) {
    if (closes.size() < 2) throw ValidationError("at least 2 closes are needed to form a return");
    std::vector<double> out;
    out.reserve(closes.size() - 1);
    for (std::size_t i = 0; i < closes.size(); ++i) {
        if (!(closes[i] > 0.0 && std::isfinite(closes[i]))) {
            throw ValidationError("close prices must be positive");
        }
        if (i > 0) out.push_back(std::log(closes[i] / closes[i - 1]));
    }
    return out;
}

ReturnSeries parse_series(std::istream& in, SeriesFormat format, char delimiter,
                          const ColumnMap& columns, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        header = split(line, delimiter);
        break;
    }
    if (header.empty()) throw InputError(source + ": no header row");

    std::optional<std::size_t> date_col =
        find_column(header, columns.date_name.value_or("date"));
    if (columns.date_name && !date_col) {
        throw InputError(source + ": date column '" + *columns.date_name + "' not in header", line_no);
    }

    std::size_t value_col = 0;
    if (columns.value_name) {
        const auto found = find_column(header, *columns.value_name);
        if (!found) {
            throw InputError(source + ": column '" + *columns.value_name + "' not in header", line_no);
        }
        value_col = *found;
    } else if (columns.value_index) {
        value_col = *columns.value_index;
        if (value_col >= header.size()) {
            throw InputError(source + ": column index " + std::to_string(value_col) +
                                 " beyond the " + std::to_string(header.size()) + " header columns",
                             line_no);
        }
    } else {
        const auto& names = format == SeriesFormat::Closes
                                ? std::vector<std::string>{"close", "adj close", "adj_close", "price"}
                                : std::vector<std::string>{"return", "returns", "log_return"};
        std::optional<std::size_t> found;
        for (const auto& n : names) {
            if ((found = find_column(header, n))) break;
        }
        value_col = found.value_or(date_col && *date_col == 0 && header.size() > 1 ? 1 : 0);
    }
    if (date_col && *date_col == value_col) date_col.reset();

    std::vector<double> values;
    std::vector<std::string> dates;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split(line, delimiter);
        const std::size_t needed = std::max(value_col, date_col.value_or(0)) + 1;
        if (fields.size() < needed) {
            throw InputError(source + ": expected at least " + std::to_string(needed) +
                                 " fields, found " + std::to_string(fields.size()),
                             line_no);
        }
        double v = 0.0;
        if (!parse_number(fields[value_col], v)) {
            throw InputError(source + ": cannot parse '" + fields[value_col] + "' as a number", line_no);
        }
        if (format == SeriesFormat::Closes && !(v > 0.0)) {
            throw InputError(source + ": close price must be positive, got " + fields[value_col], line_no);
        }
        if (date_col) {
            const std::string& d = fields[*date_col];
            if (!valid_iso_date(d)) throw InputError(source + ": invalid ISO-8601 date '" + d + "'", line_no);
            if (!dates.empty() && !(d > dates.back())) {
                throw InputError(source + ": dates must be strictly increasing ('" + d +
                                     "' follows '" + dates.back() + "')",
                                 line_no);
            }
            dates.push_back(d);
        }
        values.push_back(v);
    }

    ReturnSeries series;
    series.source = source;
    if (format == SeriesFormat::Closes) {
        if (values.size() < 2) throw InputError(source + ": at least 2 closes are needed");
        series.returns = log_returns(values);
        if (!dates.empty()) series.dates.assign(dates.begin() + 1, dates.end());
    } else {
        if (values.empty()) throw InputError(source + ": no data rows");
        series.returns = std::move(values);
        series.dates = std::move(dates);
    }
    return series;
}

ReturnSeries load_series(const std::string& path, SeriesFormat format, char delimiter,
                         const ColumnMap& columns) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_series(in, format, delimiter, columns, path);
}

std::vector<std::span<const double>> segment(std::span<const double> returns,
                                             std::size_t window_len) {
    if (window_len < 2) throw ValidationError("window length must be >= 2");
    std::vector<std::span<const double>> windows;
    for (std::size_t start = 0; start + window_len <= returns.size(); start += window_len) {
        windows.push_back(returns.subspan(start, window_len));
    }
    return windows;
}

std::vector<std::span<const double>> segment(const ReturnSeries& series, std::size_t window_len) {
    return segment(std::span<const double>(series.returns), window_len);
}

}  // namespace gosset
