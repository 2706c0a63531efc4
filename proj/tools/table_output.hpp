#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gosset::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class Format { Csv, Json };

/// Shortest round-trip text for a double; non-finite values print as inf, -inf, nan.
std::string format_number(double v);

/// One table: CSV header + rows, or a JSON array of row objects.
/// Several tables: CSV sections headed "# name" separated by blank lines, or a
/// JSON object keyed by table name.
void write_tables(std::ostream& out, const std::vector<Table>& tables, Format format);

}  // namespace gosset::cli
