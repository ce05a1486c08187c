#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "graspmix/analysis.hpp"
#include "graspmix/error.hpp"
#include "graspmix/io/ply.hpp"

namespace graspmix::io {

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(trim(cell));
  return out;
}

}  // namespace detail

/// Reads (x, sr) pairs. A header naming both columns is required; other
/// columns are ignored.
inline std::vector<ScalingPoint> read_scaling_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open " + path.string());
  const std::string where = path.string();
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::format, where + ": empty file");
  const auto header = detail::split_csv(line);
  const auto xi = std::find(header.begin(), header.end(), "x");
  const auto si = std::find(header.begin(), header.end(), "sr");
  require(xi != header.end() && si != header.end(), Errc::format, where + ": header must name columns 'x' and 'sr'");
  const auto xcol = static_cast<std::size_t>(xi - header.begin());
  const auto scol = static_cast<std::size_t>(si - header.begin());
  std::vector<ScalingPoint> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    const std::string at = where + ":" + std::to_string(line_no);
    require(cells.size() == header.size(), Errc::format, at + ": expected " + std::to_string(header.size()) + " columns");
    out.push_back({detail::parse_double(cells[xcol], at), detail::parse_double(cells[scol], at)});
  }
  return out;
}

/// Evenly spaced (x, fitted sr) rows over [lo, hi] for external plotting.
inline std::string plot_csv(double lo, double hi, std::size_t rows, const std::function<double(double)>& model) {
  std::string out = "x,fitted_sr\n";
  char buf[96];
  for (std::size_t i = 0; i < rows; ++i) {
    const double x = rows == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(rows - 1);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", x, model(x));
    out += buf;
  }
  return out;
}

}  // namespace graspmix::io
