#pragma once

#include <json.hpp>

#include <string>

#include "graspmix/error.hpp"

namespace graspmix {

/// Name and semantic version stamped into every emitted file.
struct FormatVersion {
  std::string name;
  std::string version;

  int major() const { return std::stoi(version.substr(0, version.find('.'))); }

  nlohmann::json to_json() const { return {{"name", name}, {"version", version}}; }
};

namespace formats {
inline const FormatVersion trajectory{"graspmix.trajectory", "1.0.0"};
inline const FormatVersion grasp_labels{"graspmix.grasp-labels", "1.0.0"};
inline const FormatVersion manifest{"graspmix.mixture-manifest", "1.0.0"};
inline const FormatVersion fit_report{"graspmix.fit-report", "1.0.0"};
inline const FormatVersion corpus_stats{"graspmix.corpus-stats", "1.0.0"};
}  // namespace formats

/// Throws a format error unless `j` carries `expected`'s name and major version.
inline void check_format(const nlohmann::json& j, const FormatVersion& expected) {
  require(j.is_object() && j.contains("format") && j["format"].is_object(), Errc::format,
          "missing format block (expected " + expected.name + ")");
  const auto& f = j["format"];
  require(f.value("name", "") == expected.name, Errc::format,
          "unexpected format '" + f.value("name", "") + "', expected '" + expected.name + "'");
  const std::string version = f.value("version", "");
  int major = -1;
  try {
    major = FormatVersion{expected.name, version}.major();
  } catch (const std::exception&) {
    fail(Errc::format, "malformed format version '" + version + "'");
  }
  require(major == expected.major(), Errc::format,
          "unsupported " + expected.name + " major version " + std::to_string(major) + " (supported: " +
              std::to_string(expected.major()) + ")");
}

}  // namespace graspmix
