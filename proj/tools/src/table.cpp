#include "hegsim_app/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace hegsim::app {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("table row has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

void Table::prepend_columns(const std::vector<std::string>& names, const std::vector<Cell>& values) {
    columns.insert(columns.begin(), names.begin(), names.end());
    for (auto& row : rows) row.insert(row.begin(), values.begin(), values.end());
}

void Table::append(const Table& other) {
    if (columns.empty() && rows.empty()) columns = other.columns;
    if (other.columns != columns) throw std::logic_error("cannot append tables with different columns");
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{}, cell);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::ordered_json to_json(const Cell& cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(double d) const {
            return std::isfinite(d) ? nlohmann::ordered_json(d) : nlohmann::ordered_json(nullptr);
        }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
    };
    return std::visit(Visitor{}, cell);
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
    for (const auto& [key, value] : table.metadata) out << "# " << key << '=' << value << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << csv_escape(table.columns[c]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_escape(format_cell(row[c]));
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& table) {
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.metadata) doc["metadata"][key] = value;
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = to_json(row[c]);
        doc["rows"].push_back(std::move(obj));
    }
    out << doc.dump(2) << '\n';
}

}  // namespace hegsim::app
