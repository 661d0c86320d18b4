#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ragdepth {

using Cell = std::variant<std::int64_t, double, bool, std::string>;

// Column-named result table emitted by every experiment as CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;

  void write_csv(std::ostream& os) const;
  // Array of objects keyed by column name.
  nlohmann::ordered_json to_json() const;
};

std::string format_cell(const Cell& cell);

}  // namespace ragdepth
