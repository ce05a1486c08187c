#pragma once

// Test fixtures and oracles. Oracles here deliberately avoid the library's
// spatial index, quaternion helpers and angle routines: they work on raw
// rotation matrices and scan every point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "graspmix/grasp.hpp"
#include "graspmix/rng.hpp"

namespace fixtures {

using graspmix::Direction;
using graspmix::GraspCandidate;
using graspmix::GripperModel;
using graspmix::PointCloud;
using graspmix::Vec3;

inline constexpr double kDeg = std::numbers::pi / 180.0;

/// Points uniform on the faces of an axis-aligned cube centred at `center`,
/// face = i % 6 so each face gets n/6 points. Outward normals.
inline PointCloud cube_cloud(std::size_t n, double side, std::uint64_t seed, const Vec3& center = Vec3::Zero()) {
  PointCloud c;
  c.object_id = "cube";
  graspmix::Rng rng(seed);
  const double h = 0.5 * side;
  for (std::size_t i = 0; i < n; ++i) {
    const int face = static_cast<int>(i % 6);
    const int axis = face / 2;
    const double sign = face % 2 ? 1.0 : -1.0;
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = rng.uniform(-h, h);
    p[axis] = sign * h;
    Vec3 nrm = Vec3::Zero();
    nrm[axis] = sign;
    c.points.push_back({center + p, Direction(nrm)});
  }
  return c;
}

/// Face index (0..5, same numbering as cube_cloud) of a point on an
/// origin-centred cube.
inline int cube_face(const Vec3& p) {
  int axis = 0;
  p.cwiseAbs().maxCoeff(&axis);
  return 2 * axis + (p[axis] > 0.0 ? 1 : 0);
}

/// Symmetric wedge about the x-z plane. Each flank is a grid of points on a
/// plane tilted by `alpha` from the closing axis normal, passing through
/// (0, +-half_gap, z_mid). Outward normals (0, +-cos a, -sin a) make angle
/// `alpha` with the closing axis. The -y flank is the exact mirror of the +y
/// flank, so the contact segment is parallel to y.
inline PointCloud wedge_cloud(double alpha, double half_gap = 0.03, double z_mid = -0.02, int grid = 21,
                              double extent = 0.02) {
  PointCloud c;
  c.object_id = "wedge";
  const double ta = std::tan(alpha);
  for (int side : {+1, -1}) {
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const double x = -extent + 2.0 * extent * i / (grid - 1);
        const double z = z_mid - extent + 2.0 * extent * j / (grid - 1);
        const double y = half_gap + (z - z_mid) * ta;
        c.points.push_back({Vec3(x, side * y, z), Direction::normalized(Vec3(0.0, side * std::cos(alpha), -std::sin(alpha)))});
      }
    }
  }
  return c;
}

/// Two flat plates perpendicular to y at +-half_gap, normals pointing away
/// from each other.
inline PointCloud plates_cloud(double half_gap = 0.03, double z_mid = -0.02, int grid = 11, double extent = 0.02) {
  return wedge_cloud(0.0, half_gap, z_mid, grid, extent);
}

/// Candidate at `pose` with the fields a hand-built grasp needs.
inline GraspCandidate candidate_at(const graspmix::Pose& pose) {
  GraspCandidate c;
  c.pose = pose;
  c.seed = pose.translation();
  c.approach = Direction::normalized(pose.rotation_matrix().col(2));
  return c;
}

// ------------------------------------------------------------ brute force

struct BruteResult {
  bool collision_free = false;
  double bite = 0.0;
  bool closed = false;
  std::size_t ci = 0, cj = 0;
};

/// World point into grasp-local coordinates via an explicit matrix transpose.
inline Vec3 to_local(const Eigen::Matrix3d& r, const Vec3& t, const Vec3& p) { return r.transpose() * (p - t); }

inline bool strictly_in_box(const Vec3& local, const Vec3& center, const Vec3& full_extents) {
  for (int k = 0; k < 3; ++k) {
    if (!(std::abs(local[k] - center[k]) < 0.5 * full_extents[k])) return false;
  }
  return true;
}

/// Independent re-check of a grasp: every point against the three boxes,
/// deepest point in the closing slab, nearest-point contacts by full scan,
/// friction test in tangent form (tan angle < mu).
inline BruteResult brute_check(const GraspCandidate& c, const PointCloud& cloud, const GripperModel& g, double mu) {
  const Eigen::Matrix3d r = c.pose.rotation().toRotationMatrix();
  const Vec3 t = c.pose.translation();
  const double w = g.opening, L = g.finger_length;
  const Vec3 fe = g.finger_extents, pe = g.palm_extents;
  const Vec3 finger_pos(0.0, 0.5 * w + 0.5 * fe.y(), -0.5 * fe.z());
  const Vec3 finger_neg(0.0, -(0.5 * w + 0.5 * fe.y()), -0.5 * fe.z());
  const Vec3 palm(0.0, 0.0, -L - 0.5 * pe.z());

  BruteResult out;
  out.collision_free = true;
  for (const auto& sp : cloud.points) {
    const Vec3 l = to_local(r, t, sp.position);
    if (strictly_in_box(l, finger_pos, fe) || strictly_in_box(l, finger_neg, fe) || strictly_in_box(l, palm, pe)) {
      out.collision_free = false;
    }
    if (std::abs(l.x()) <= 0.5 * fe.x() && std::abs(l.y()) <= 0.5 * w && l.z() <= 0.0 && l.z() >= -L) {
      out.bite = std::max(out.bite, -l.z());
    }
  }

  auto nearest = [&](const Vec3& q) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      const double d = (cloud.points[i].position - q).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  };
  out.ci = nearest(r * Vec3(0.0, 0.5 * w, -0.5 * fe.z()) + t);
  out.cj = nearest(r * Vec3(0.0, -0.5 * w, -0.5 * fe.z()) + t);
  if (out.ci == out.cj) return out;
  const Vec3 d = cloud.points[out.ci].position - cloud.points[out.cj].position;
  auto tan_angle = [](const Vec3& n, const Vec3& v) {
    const double along = n.dot(v);
    const double across = n.cross(v).norm();
    return along > 0.0 ? across / along : std::numeric_limits<double>::infinity();
  };
  out.closed = tan_angle(cloud.points[out.ci].normal.vec(), d) < mu && tan_angle(cloud.points[out.cj].normal.vec(), -d) < mu;
  return out;
}

/// Random rigid transform: uniform rotation from a normalized Gaussian
/// quaternion, translation uniform in a 1 m cube.
inline graspmix::Pose random_pose(std::mt19937_64& gen, double span = 1.0) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-span, span);
  Eigen::Quaterniond q(nd(gen), nd(gen), nd(gen), nd(gen));
  q.normalize();
  return graspmix::Pose(q, Vec3(ud(gen), ud(gen), ud(gen)));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("graspmix_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
