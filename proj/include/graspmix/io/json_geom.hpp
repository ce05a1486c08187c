#pragma once

#include <json.hpp>

#include <string>

#include "graspmix/error.hpp"
#include "graspmix/geom.hpp"

namespace graspmix::io {

inline nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec_from_json(const nlohmann::json& j, const std::string& what) {
  require(j.is_array() && j.size() == 3, Errc::format, what + ": expected a 3-element array");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    require(j[k].is_number(), Errc::format, what + ": expected numbers");
    v[k] = j[k].get<double>();
  }
  require(is_finite(v), Errc::format, what + ": non-finite value");
  return v;
}

/// {"q": [w, x, y, z], "t": [x, y, z]}
inline nlohmann::json pose_json(const Pose& p) {
  const Quat& q = p.rotation();
  return {{"q", nlohmann::json::array({q.w(), q.x(), q.y(), q.z()})}, {"t", vec_json(p.translation())}};
}

inline Pose pose_from_json(const nlohmann::json& j, const std::string& what) {
  require(j.is_object() && j.contains("q") && j.contains("t"), Errc::format, what + ": expected {q, t}");
  const auto& q = j["q"];
  require(q.is_array() && q.size() == 4, Errc::format, what + ": quaternion must have 4 entries");
  for (const auto& c : q) require(c.is_number(), Errc::format, what + ": quaternion entries must be numbers");
  const Quat quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  require(quat.coeffs().allFinite() && std::abs(quat.norm() - 1.0) <= 1e-6, Errc::format,
          what + ": quaternion is not unit length");
  return Pose(quat, vec_from_json(j["t"], what + ".t"));
}

}  // namespace graspmix::io
