#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gosset {

enum class SeriesFormat { Closes, Returns };

/// Column selection. A name wins over an index; with neither, the loader looks
/// for a conventional header ("close", "adj close", "price" or "return", "log_return")
/// and falls back to the first column after the date column.
struct ColumnMap {
    std::optional<std::string> value_name;
    std::optional<std::size_t> value_index;
    std::optional<std::string> date_name;  ///< default "date" when present in the header
};

/// Daily log returns, optionally dated (the date of the later close for each return).
struct ReturnSeries {
    std::vector<std::string> dates;  ///< empty or one ISO-8601 date per return
    std::vector<double> returns;
    std::string source;
};

/// Reads a delimited text file with a header row. CLOSES input is converted to
/// ln(P[i+1] / P[i]). Errors carry the 1-based line number of the offending row.
ReturnSeries load_series(const std::string& path, SeriesFormat format, char delimiter = ',',
                         const ColumnMap& columns = {});

ReturnSeries parse_series(std::istream& in, SeriesFormat format, char delimiter = ',',
                          const ColumnMap& columns = {}, const std::string& source = "<stream>");

/// Log returns of a close series; requires at least 2 positive closes.
std::vector<double> log_returns(std::span<const double> closes);

/// floor(n / window_len) consecutive non-overlapping windows; the trailing
/// partial window is discarded. Requires window_len >= 2.
std::vector<std::span<const double>> segment(std::span<const double> returns,
                                             std::size_t window_len);
std::vector<std::span<const double>> segment(const ReturnSeries& series, std::size_t window_len);

}  // namespace gosset
