#pragma once

// Scripted pick trajectories with ground-truth phases.
//
// A scene is a target position, a grasp g (given in the target's frame), an
// approach offset dT and a random start pose. gen_full scripts
//   start -> random waypoint -> g_app = g * dT   (straight legs, fixed step)
//   g_app -> g                                   (linear descent)
//   close the gripper over 5 steps, lift target and gripper together.
// gen_srp_only stops at g_app with the gripper open. Both draw the scene
// from the same streams, so equal seeds give twin trajectories.
//
// Ground truth: a step is PIP from the first scripted step inside the
// interaction zone (distance <= 0.2 m and approach-to-target angle <= 60 deg)
// up to the scripted lift step that completes the grasp; elsewhere the zone
// test decides.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/geom.hpp"
#include "graspmix/rng.hpp"
#include "graspmix/traj.hpp"

namespace graspmix {

/// Default grasp in the target frame: top-down (approach along world -z),
/// finger tips 3 cm above the target's reference point.
inline Pose default_top_down_grasp() {
  return Pose(Quat(Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX())), Vec3(0.0, 0.0, 0.03));
}

struct SynthTaskSpec {
  Aabb workspace{Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 0.8)};
  Aabb target_bounds{Vec3(-0.2, -0.2, 0.05), Vec3(0.2, 0.2, 0.10)};
  Pose grasp = default_top_down_grasp();
  OffsetRanges offsets;
  double step_length = 0.01;
  double lift_height = 0.10;
  double dt = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    require(!workspace.degenerate(), Errc::invalid_spec, "workspace box is degenerate");
    require(workspace.contains(target_bounds.min) && workspace.contains(target_bounds.max) &&
                (target_bounds.max.array() >= target_bounds.min.array()).all(),
            Errc::invalid_spec, "target bounds must lie inside the workspace");
    require(std::isfinite(step_length) && step_length > 0.0, Errc::invalid_spec, "step length must be positive");
    require(std::isfinite(lift_height) && lift_height >= 0.0, Errc::invalid_spec, "lift height must be >= 0");
    require(std::isfinite(dt) && dt > 0.0, Errc::invalid_spec, "time step must be positive");
    offsets.validate();
  }
};

namespace detail {

inline constexpr std::size_t kCloseSteps = 5;
inline constexpr double kStartClearance = 0.05;  // beyond the 0.2 m zone radius
inline constexpr int kStartAttempts = 1000;

struct Scene {
  Vec3 target;
  Pose grasp;
  OffsetSample offset;
  Pose approach;
  Pose start;
  Vec3 waypoint;
  std::string target_id;
};

inline Scene draw_scene(const SynthTaskSpec& spec) {
  spec.validate();
  Rng rng(spec.seed, Stream::synth_scene);
  Scene sc;
  for (int k = 0; k < 3; ++k) sc.target[k] = rng.uniform(spec.target_bounds.min[k], spec.target_bounds.max[k]);
  sc.target_id = "object_" + std::to_string(rng.index(1000));
  sc.grasp = Pose::from_translation(sc.target) * spec.grasp;
  require(spec.workspace.contains(sc.grasp.translation()), Errc::invalid_spec, "grasp pose outside the workspace");

  Rng offset_rng(spec.seed, Stream::offsets);
  sc.offset = draw_offset(spec.offsets, offset_rng);
  sc.approach = approach_pose(sc.grasp, sc.offset.to_pose());
  require(spec.workspace.contains(sc.approach.translation()), Errc::invalid_spec,
          "approach pose outside the workspace");

  const double min_start = SegmentationConfig{}.dist_thresh + kStartClearance;
  bool found = false;
  Vec3 start;
  for (int attempt = 0; attempt < kStartAttempts && !found; ++attempt) {
    for (int k = 0; k < 3; ++k) start[k] = rng.uniform(spec.workspace.min[k], spec.workspace.max[k]);
    found = (start - sc.target).norm() > min_start;
  }
  require(found, Errc::invalid_spec, "workspace too small to place a start pose away from the target");
  const double a = std::numbers::pi / 4;
  const Quat tilt = rpy_to_rotation({rng.uniform(-a, a), rng.uniform(-a, a), rng.uniform(-a, a)});
  sc.start = Pose(sc.approach.rotation() * tilt, start);

  const Vec3 mid = 0.5 * (sc.start.translation() + sc.approach.translation());
  const double leg = (sc.approach.translation() - sc.start.translation()).norm();
  const Vec3 dir = Vec3(rng.normal(), rng.normal(), rng.normal());
  const double mag = rng.uniform(0.0, 0.1 * leg);
  sc.waypoint = spec.workspace.clamp(dir.norm() > 0.0 ? Vec3(mid + dir.normalized() * mag) : mid);
  return sc;
}

/// Poses from start through the waypoint to the approach pose, one per step
/// length along each straight leg, ending exactly at the approach pose.
inline std::vector<Pose> approach_leg(const Scene& sc, double step) {
  const Vec3 p0 = sc.start.translation();
  const Vec3 p2 = sc.approach.translation();
  const Vec3& p1 = sc.waypoint;
  const double l1 = (p1 - p0).norm();
  const double l2 = (p2 - p1).norm();
  const double total = l1 + l2;
  const auto n1 = static_cast<std::size_t>(std::max(1.0, std::ceil(l1 / step)));
  const auto n2 = static_cast<std::size_t>(std::max(1.0, std::ceil(l2 / step)));
  const Quat& q0 = sc.start.rotation();
  const Quat& q1 = sc.approach.rotation();
  auto orient = [&](double arclen) { return q0.slerp(total > 0.0 ? arclen / total : 1.0, q1); };

  std::vector<Pose> out;
  for (std::size_t k = 0; k < n1; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n1);
    out.emplace_back(orient(f * l1), p0 + f * (p1 - p0));
  }
  for (std::size_t k = 0; k < n2; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n2);
    out.emplace_back(orient(l1 + f * l2), p1 + f * (p2 - p1));
  }
  out.push_back(sc.approach);
  return out;
}

/// Interaction-zone test used for ground truth, written against rotation
/// matrices independently of step_phase.
inline bool in_interaction_zone(const Pose& ee, const Vec3& target) {
  const SegmentationConfig cfg;
  const Mat3 r = ee.rotation_matrix();
  const Vec3 v = target - ee.translation();
  const double d = v.norm();
  if (d > cfg.dist_thresh) return false;
  if (d == 0.0) return true;
  const double c = std::clamp(r.col(2).dot(v) / d, -1.0, 1.0);
  return std::acos(c) <= cfg.angle_thresh;
}

inline Trajectory assemble(const SynthTaskSpec& spec, const Scene& sc, Source source,
                           const std::vector<Pose>& poses, const std::vector<double>& gripper,
                           const std::vector<Vec3>& targets, std::optional<std::size_t> completion) {
  Trajectory traj;
  traj.instruction = "pick up the " + sc.target_id;
  traj.target_id = sc.target_id;
  traj.target_init_pose = Pose::from_translation(sc.target);
  traj.source = source;
  traj.seed = spec.seed;
  const std::size_t n = poses.size();
  std::size_t onset = n;
  for (std::size_t i = 0; i < n && onset == n; ++i) {
    if (in_interaction_zone(poses[i], targets[i])) onset = i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(spec.workspace.contains(poses[i].translation()), Errc::invalid_spec,
            "scripted motion leaves the workspace");
    TrajectoryStep s;
    s.t = static_cast<double>(i) * spec.dt;
    s.ee_pose = poses[i];
    s.gripper_open = gripper[i];
    s.target_position = targets[i];
    const bool interacting = completion && i >= onset && i <= *completion;
    s.gt_phase = interacting || in_interaction_zone(poses[i], targets[i]) ? Phase::pip : Phase::srp;
    traj.steps.push_back(std::move(s));
  }
  traj.validate();
  return traj;
}

}  // namespace detail

inline Trajectory gen_full(const SynthTaskSpec& spec) {
  const detail::Scene sc = detail::draw_scene(spec);
  std::vector<Pose> poses = detail::approach_leg(sc, spec.step_length);
  std::vector<double> gripper(poses.size(), 1.0);

  const Vec3 a = sc.approach.translation();
  const Vec3 b = sc.grasp.translation();
  const auto descent = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a).norm() / spec.step_length)));
  for (std::size_t k = 1; k <= descent; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(descent);
    poses.emplace_back(sc.approach.rotation().slerp(f, sc.grasp.rotation()), a + f * (b - a));
    gripper.push_back(1.0);
  }
  for (std::size_t k = 1; k <= detail::kCloseSteps; ++k) {
    poses.push_back(sc.grasp);
    gripper.push_back(1.0 - static_cast<double>(k) / static_cast<double>(detail::kCloseSteps));
  }
  std::vector<Vec3> targets(poses.size(), sc.target);

  // The grasp completes at the first lift step with the gripper shut for the
  // hold count and the target raised past the lift threshold.
  const SegmentationConfig cfg;
  std::size_t closed_run = 0;
  for (double gv : gripper) closed_run = gv < cfg.close_thresh ? closed_run + 1 : 0;
  std::optional<std::size_t> completion;
  const auto lift = static_cast<std::size_t>(std::max(1.0, std::ceil(spec.lift_height / spec.step_length)));
  for (std::size_t k = 1; k <= lift; ++k) {
    const Vec3 up(0.0, 0.0, spec.lift_height * static_cast<double>(k) / static_cast<double>(lift));
    poses.emplace_back(sc.grasp.rotation(), b + up);
    gripper.push_back(0.0);
    targets.push_back(sc.target + up);
    ++closed_run;
    if (!completion && closed_run >= cfg.hold_steps && up.norm() >= cfg.lift_thresh) {
      completion = poses.size() - 1;
    }
  }
  return detail::assemble(spec, sc, Source::full, poses, gripper, targets, completion);
}

inline Trajectory gen_srp_only(const SynthTaskSpec& spec) {
  const detail::Scene sc = detail::draw_scene(spec);
  const std::vector<Pose> poses = detail::approach_leg(sc, spec.step_length);
  const std::vector<double> gripper(poses.size(), 1.0);
  const std::vector<Vec3> targets(poses.size(), sc.target);
  return detail::assemble(spec, sc, Source::srp_only, poses, gripper, targets, std::nullopt);
}

/// The offset drawn for a spec (identical for gen_full and gen_srp_only).
inline OffsetSample scene_offset(const SynthTaskSpec& spec) { return detail::draw_scene(spec).offset; }

/// Copy with i.i.d. Gaussian noise (per axis, meters) added to every
/// end-effector position.
inline Trajectory add_position_noise(Trajectory traj, double sigma, std::uint64_t seed) {
  require(std::isfinite(sigma) && sigma >= 0.0, Errc::invalid_argument, "noise sigma must be >= 0");
  Rng rng(seed, Stream::noise);
  for (auto& s : traj.steps) {
    const Vec3 n(rng.normal(), rng.normal(), rng.normal());
    s.ee_pose = Pose(s.ee_pose.rotation(), s.ee_pose.translation() + sigma * n);
  }
  return traj;
}

}  // namespace graspmix
