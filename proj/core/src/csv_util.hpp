#pragma once

// Internal CSV and number-formatting helpers. Doubles are written in the
// shortest representation that parses back to the identical value, which the
// byte-identical export requirements rely on.

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "axdse/error.hpp"

namespace axdse::detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view cell, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw Error("non-numeric cell '" + std::string(cell) + "' in " + context);
  return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(pos));
      break;
    }
    cells.emplace_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return cells;
}

}  // namespace axdse::detail
