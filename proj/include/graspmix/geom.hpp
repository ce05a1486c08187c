#pragma once

// SE(3) primitives, Euler conversions and direction/rotation lattices.
//
// Conventions:
//   * Rotations are stored as unit quaternions (w, x, y, z).
//   * EulerRPY uses R = Rz(yaw) * Ry(pitch) * Rx(roll): roll about the fixed
//     x axis first, then pitch about fixed y, then yaw about fixed z.
//   * Pose composition a * b applies b first, then a (a * b maps b's frame
//     into a's parent frame).

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "graspmix/error.hpp"

namespace graspmix {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

/// Angle in [0, pi] between two non-zero vectors. atan2 keeps precision near
/// 0 and pi where acos does not.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Unit 3-vector.
class Direction {
 public:
  static constexpr double kTolerance = 1e-12;

  Direction() : v_(Vec3::UnitZ()) {}

  /// Accepts an already-unit vector; throws when its norm is off by more
  /// than the tolerance.
  explicit Direction(const Vec3& unit) : v_(unit) {
    require(is_finite(unit) && std::abs(unit.norm() - 1.0) <= kTolerance, Errc::invalid_argument,
            "direction is not a unit vector");
  }

  static Direction normalized(const Vec3& v) {
    const double n = v.norm();
    require(is_finite(v) && n > 0.0, Errc::invalid_argument, "cannot normalize a zero or non-finite vector");
    Direction d;
    d.v_ = v / n;
    return d;
  }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

 private:
  Vec3 v_;
};

struct EulerRPY {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Rigid transform: rotation followed by translation (meters).
class Pose {
 public:
  static constexpr double kNormTolerance = 1e-9;

  Pose() : q_(Quat::Identity()), t_(Vec3::Zero()) {}

  Pose(const Quat& rotation, const Vec3& translation) : q_(rotation), t_(translation) {
    require(is_finite(translation) && q_.coeffs().allFinite(), Errc::invalid_argument, "pose is not finite");
    const double n = q_.norm();
    require(n > 0.5 && n < 2.0, Errc::invalid_argument, "pose rotation is not a unit quaternion");
    // Leave already-unit quaternions untouched so that serialized poses
    // read back bit for bit.
    if (std::abs(n - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) q_.coeffs() /= n;
  }

  Pose(const Mat3& rotation, const Vec3& translation) : Pose(Quat(rotation), translation) {}

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return Pose(Quat::Identity(), t); }

  const Quat& rotation() const { return q_; }
  const Vec3& translation() const { return t_; }
  Mat3 rotation_matrix() const { return q_.toRotationMatrix(); }

  /// Maps a point from this pose's local frame into the parent frame.
  Vec3 operator*(const Vec3& p) const { return q_ * p + t_; }

  Pose operator*(const Pose& other) const { return Pose(q_ * other.q_, q_ * other.t_ + t_); }

  Pose inverse() const {
    const Quat qi = q_.conjugate();
    return Pose(qi, -(qi * t_));
  }

  /// Maps a parent-frame point into this pose's local frame.
  Vec3 to_local(const Vec3& p) const { return q_.conjugate() * (p - t_); }

  /// Axis of the local frame expressed in the parent frame (0 = x, 1 = y, 2 = z).
  Vec3 axis(int i) const { return q_ * Vec3::Unit(i); }

 private:
  Quat q_;
  Vec3 t_;
};

/// Rotation angle in [0, pi] of a unit quaternion.
inline double rotation_angle(const Quat& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

/// Distance between two poses as (rotation angle of a^-1 b, translation gap).
inline std::pair<double, double> pose_distance(const Pose& a, const Pose& b) {
  return {rotation_angle(a.rotation().conjugate() * b.rotation()), (a.translation() - b.translation()).norm()};
}

inline Quat rpy_to_rotation(const EulerRPY& e) {
  require(std::isfinite(e.roll) && std::isfinite(e.pitch) && std::isfinite(e.yaw), Errc::invalid_argument,
          "euler angles must be finite");
  Quat q = Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(e.pitch, Vec3::UnitY()) *
           Eigen::AngleAxisd(e.roll, Vec3::UnitX());
  q.normalize();
  return q;
}

/// Inverse of rpy_to_rotation away from gimbal lock. Throws
/// degenerate_orientation when |pitch| >= pi/2 - 1e-6.
inline EulerRPY rotation_to_rpy(const Quat& q) {
  static constexpr double kGimbalMargin = 1e-6;
  const Mat3 m = q.normalized().toRotationMatrix();
  const double c = std::hypot(m(0, 0), m(1, 0));
  const double pitch = std::atan2(-m(2, 0), c);
  require(std::abs(pitch) < std::numbers::pi / 2.0 - kGimbalMargin, Errc::degenerate_orientation,
          "pitch at gimbal lock; roll and yaw are not separable");
  return {std::atan2(m(2, 1), m(2, 2)), pitch, std::atan2(m(1, 0), m(0, 0))};
}

/// n directions on the Fibonacci lattice, k = 1..n:
///   z_k = (2k - 1)/n - 1,  x_k = sqrt(1 - z_k^2) cos(2 pi k phi),  y_k = sqrt(1 - z_k^2) sin(2 pi k phi)
/// with phi = (sqrt(5) - 1)/2. Values are not renormalized so z stays exact.
inline std::vector<Direction> fibonacci_directions(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "fibonacci lattice needs n >= 1");
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double nd = static_cast<double>(n);
  std::vector<Direction> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    const double z = (2.0 * kd - 1.0) / nd - 1.0;
    const double r = std::sqrt(1.0 - z * z);
    const double ang = 2.0 * std::numbers::pi * kd * phi;
    out.emplace_back(Vec3(r * std::cos(ang), r * std::sin(ang), z));
  }
  return out;
}

/// k rotations about `axis` with angles j*pi/k, j = 0..k-1 (pi itself is
/// excluded: a parallel gripper rolled by pi is the same grasp).
inline std::vector<Quat> semicircle_rotations(const Direction& axis, std::size_t k) {
  require(k >= 1, Errc::invalid_argument, "semicircle sampling needs k >= 1");
  std::vector<Quat> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double theta = static_cast<double>(j) * std::numbers::pi / static_cast<double>(k);
    out.emplace_back(Eigen::AngleAxisd(theta, axis.vec()));
  }
  return out;
}

/// Rotation whose local +z axis is `a`. The local x axis is the component of
/// world x orthogonal to a (world y when a is within ~25 deg of world x).
inline Quat align_z(const Direction& a) {
  const Vec3& z = a.vec();
  const Vec3 ref = std::abs(z.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 x = (ref - ref.dot(z) * z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = z;
  Quat q(m);
  q.normalize();
  return q;
}

/// Axis-aligned box.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool degenerate() const { return !((max.array() > min.array()).all()); }
  Vec3 clamp(const Vec3& p) const { return p.cwiseMax(min).cwiseMin(max); }
};

}  // namespace graspmix
