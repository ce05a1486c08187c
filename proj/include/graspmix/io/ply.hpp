#pragma once

// ASCII PLY point clouds with per-vertex normals (x y z nx ny nz).

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/grasp.hpp"

namespace graspmix::io {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  require(ec == std::errc() && ptr == last, Errc::format, where + ": cannot parse number '" + tok + "'");
  require(std::isfinite(v), Errc::format, where + ": non-finite value '" + tok + "'");
  return v;
}

}  // namespace detail

inline constexpr double kNormalTolerance = 1e-3;

inline PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open " + path.string());
  const std::string where = path.string();
  std::string line;
  require(std::getline(in, line) && detail::split_ws(line) == std::vector<std::string>{"ply"}, Errc::format,
          where + ": not a PLY file");

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
  };
  std::vector<Element> elements;
  bool ascii = false;
  bool ended = false;
  while (std::getline(in, line)) {
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      require(tok.size() >= 2 && tok[1] == "ascii", Errc::format, where + ": only ASCII PLY is supported");
      ascii = true;
    } else if (tok[0] == "element") {
      require(tok.size() == 3, Errc::format, where + ": malformed element line");
      Element e;
      e.name = tok[1];
      try {
        e.count = std::stoul(tok[2]);
      } catch (const std::exception&) {
        fail(Errc::format, where + ": bad element count '" + tok[2] + "'");
      }
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      require(!elements.empty() && tok.size() >= 3, Errc::format, where + ": property outside an element");
      elements.back().properties.push_back(tok.back());
    } else if (tok[0] == "end_header") {
      ended = true;
      break;
    } else {
      fail(Errc::format, where + ": unexpected header line '" + line + "'");
    }
  }
  require(ascii && ended, Errc::format, where + ": incomplete PLY header");

  std::size_t skip_lines = 0;
  const Element* vertex = nullptr;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      vertex = &e;
      break;
    }
    skip_lines += e.count;
  }
  require(vertex != nullptr, Errc::format, where + ": no vertex element");
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < vertex->properties.size(); ++i) column.emplace(vertex->properties[i], i);
  std::size_t cols[6];
  const char* names[6] = {"x", "y", "z", "nx", "ny", "nz"};
  for (int k = 0; k < 6; ++k) {
    auto it = column.find(names[k]);
    require(it != column.end(), Errc::format, where + ": missing vertex property '" + names[k] + "'");
    cols[k] = it->second;
  }

  for (std::size_t i = 0; i < skip_lines; ++i) {
    require(static_cast<bool>(std::getline(in, line)), Errc::format, where + ": truncated element data");
  }

  PointCloud cloud;
  cloud.object_id = path.stem().string();
  cloud.points.reserve(vertex->count);
  for (std::size_t i = 0; i < vertex->count; ++i) {
    require(static_cast<bool>(std::getline(in, line)), Errc::format, where + ": truncated vertex data");
    const auto tok = detail::split_ws(line);
    require(tok.size() == vertex->properties.size(), Errc::format,
            where + ": vertex " + std::to_string(i) + " has " + std::to_string(tok.size()) + " values, expected " +
                std::to_string(vertex->properties.size()));
    double v[6];
    for (int k = 0; k < 6; ++k) v[k] = detail::parse_double(tok[cols[k]], where + " vertex " + std::to_string(i));
    const Vec3 n(v[3], v[4], v[5]);
    require(std::abs(n.norm() - 1.0) <= kNormalTolerance, Errc::format,
            where + ": vertex " + std::to_string(i) + " normal is not unit length");
    cloud.points.push_back({Vec3(v[0], v[1], v[2]), Direction::normalized(n)});
  }
  return cloud;
}

/// Writes doubles with 17 significant digits so read_ply(write_ply(c)) == c.
inline void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  require(out.good(), Errc::io, "cannot write " + path.string());
  out << "ply\nformat ascii 1.0\n";
  out << "comment object_id " << cloud.object_id << "\n";
  out << "element vertex " << cloud.size() << "\n";
  for (const char* p : {"x", "y", "z", "nx", "ny", "nz"}) out << "property double " << p << "\n";
  out << "end_header\n";
  char buf[512];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g\n", p.position.x(), p.position.y(),
                  p.position.z(), p.normal.x(), p.normal.y(), p.normal.z());
    out << buf;
  }
  require(out.good(), Errc::io, "failed writing " + path.string());
}

}  // namespace graspmix::io
