#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hegsim::app {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

// Column-ordered result table with key=value metadata.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::vector<Cell> row);
    // Prepends columns with constant values to every row.
    void prepend_columns(const std::vector<std::string>& names, const std::vector<Cell>& values);
    // Appends the rows of `other`, which must have identical columns.
    void append(const Table& other);
};

// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);
std::string format_cell(const Cell& cell);

// `# key=value` metadata lines, a header row, then LF-terminated rows.
void write_csv(std::ostream& out, const Table& table);
// {"metadata": {...}, "columns": [...], "rows": [{...}, ...]}; non-finite numbers become null.
void write_json(std::ostream& out, const Table& table);

}  // namespace hegsim::app
