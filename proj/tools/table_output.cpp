#include "table_output.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

namespace gosset::cli {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) {
        if (std::isfinite(*d)) return *d;
        return format_number(*d);
    }
    if (const auto* i = std::get_if<long long>(&cell)) return *i;
    const auto& text = std::get<std::string>(cell);
    // An empty cell is a missing value.
    if (text.empty()) return nullptr;
    return text;
}

std::string to_csv(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return std::get<std::string>(cell);
}

Json table_json(const Table& t) {
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json obj = Json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = to_json(row[c]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

void table_csv(std::ostream& out, const Table& t) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << to_csv(row[c]);
        out << '\n';
    }
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_tables(std::ostream& out, const std::vector<Table>& tables, Format format) {
    if (format == Format::Json) {
        if (tables.size() == 1) {
            out << table_json(tables.front()).dump(2) << '\n';
            return;
        }
        Json doc = Json::object();
        for (const auto& t : tables) doc[t.name] = table_json(t);
        out << doc.dump(2) << '\n';
        return;
    }
    if (tables.size() == 1) {
        table_csv(out, tables.front());
        return;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i) out << '\n';
        out << "# " << tables[i].name << '\n';
        table_csv(out, tables[i]);
    }
}

}  // namespace gosset::cli
