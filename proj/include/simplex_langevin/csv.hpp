#pragma once

#include <charconv>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "simplex_langevin/optimizers.hpp"

namespace simplex_langevin::csv {

/// Locale-free rendering with 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

/// Splits one CSV line on commas. Quoting is not supported.
inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Columns: iter,f,x_1..x_n,clamped,resampled.
inline void write_trajectory(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.empty() ? 0 : traj.front().point.size();
  os << "iter,f";
  for (std::size_t i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",clamped,resampled\n";
  for (const auto& rec : traj) {
    os << rec.iter << ',' << format_double(rec.f_value);
    for (double c : rec.point) os << ',' << format_double(c);
    os << ',' << (rec.clamped ? 1 : 0) << ',' << (rec.resampled ? 1 : 0) << '\n';
  }
}

}  // namespace simplex_langevin::csv
