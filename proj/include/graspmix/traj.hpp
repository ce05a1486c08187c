#pragma once

// Trajectory model, approach-pose offsets and SRP/PIP phase segmentation.
//
// SRP (spatial reasoning phase): free-space motion towards the target.
// PIP (physical interaction phase): from the approach region until the
// interaction completes (gripper closed and target lifted).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/geom.hpp"
#include "graspmix/rng.hpp"

namespace graspmix {

enum class Phase { srp, pip };

inline std::string_view to_string(Phase p) { return p == Phase::srp ? "SRP" : "PIP"; }

inline Phase parse_phase(std::string_view s) {
  if (s == "SRP" || s == "srp") return Phase::srp;
  if (s == "PIP" || s == "pip") return Phase::pip;
  fail(Errc::format, "unknown phase '" + std::string(s) + "'");
}

enum class Source { full, srp_only };

inline std::string_view to_string(Source s) { return s == Source::full ? "full" : "srp_only"; }

inline Source parse_source(std::string_view s) {
  if (s == "full") return Source::full;
  if (s == "srp_only") return Source::srp_only;
  fail(Errc::format, "unknown trajectory source '" + std::string(s) + "'");
}

struct TrajectoryStep {
  double t = 0.0;
  Pose ee_pose;
  double gripper_open = 1.0;  // 1 = fully open, 0 = closed
  std::optional<Vec3> target_position;
  std::optional<Phase> gt_phase;
};

struct SegmentationConfig {
  double dist_thresh = 0.2;                  // meters
  double angle_thresh = std::numbers::pi / 3;  // radians
  double close_thresh = 0.1;                 // gripper fraction
  double lift_thresh = 0.02;                 // meters
  std::size_t hold_steps = 3;
  bool use_ground_truth = false;

  void validate() const {
    require(dist_thresh > 0.0 && angle_thresh > 0.0 && close_thresh > 0.0 && lift_thresh > 0.0 && hold_steps > 0,
            Errc::invalid_argument, "segmentation thresholds must be positive");
  }
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::string instruction;
  std::string target_id;
  std::optional<Pose> target_init_pose;
  Source source = Source::full;
  std::uint64_t seed = 0;

  std::size_t size() const { return steps.size(); }

  void validate() const;
};

/// Target position seen at step i: the per-step value, else the header's
/// initial target pose.
inline Vec3 target_at(const Trajectory& traj, std::size_t i) {
  const auto& step = traj.steps.at(i);
  if (step.target_position) return *step.target_position;
  require(traj.target_init_pose.has_value(), Errc::missing_target,
          "step " + std::to_string(i) + " has no target position and the header has no initial target pose");
  return traj.target_init_pose->translation();
}

inline Vec3 initial_target(const Trajectory& traj) {
  return traj.target_init_pose ? traj.target_init_pose->translation() : target_at(traj, 0);
}

/// Index of the first step at or after `from` where the gripper has stayed
/// below close_thresh for hold_steps consecutive steps (counted from `from`)
/// and the target has moved at least lift_thresh from its initial position.
inline std::optional<std::size_t> find_interaction_end(const Trajectory& traj, std::size_t from,
                                                       const SegmentationConfig& cfg) {
  const Vec3 init = initial_target(traj);
  std::size_t closed_run = 0;
  for (std::size_t j = from; j < traj.size(); ++j) {
    closed_run = traj.steps[j].gripper_open < cfg.close_thresh ? closed_run + 1 : 0;
    if (closed_run >= cfg.hold_steps && (target_at(traj, j) - init).norm() >= cfg.lift_thresh) return j;
  }
  return std::nullopt;
}

inline void Trajectory::validate() const {
  require(steps.size() >= 2, Errc::invalid_trajectory, "a trajectory needs at least two steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    require(std::isfinite(s.t), Errc::invalid_trajectory, "non-finite timestamp");
    require(i == 0 || s.t >= steps[i - 1].t, Errc::invalid_trajectory, "timestamps must be non-decreasing");
    require(s.gripper_open >= 0.0 && s.gripper_open <= 1.0, Errc::invalid_trajectory,
            "gripper_open must lie in [0, 1]");
  }
  if (source == Source::srp_only && (target_init_pose || steps.front().target_position)) {
    require(!find_interaction_end(*this, 0, SegmentationConfig{}), Errc::invalid_trajectory,
            "an SRP-only trajectory must not contain a completed grasp");
  }
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Sampling ranges for the approach offset. Translations in meters, angles
/// in radians, all expressed in the retreat frame (see offset_frame()).
struct OffsetRanges {
  Interval dx{0.0, 0.15};
  Interval dy{-0.05, 0.05};
  Interval dz{-0.05, 0.05};
  Interval droll{-std::numbers::pi / 4, std::numbers::pi / 4};
  Interval dpitch{-std::numbers::pi / 8, std::numbers::pi / 8};
  Interval dyaw{-std::numbers::pi / 8, std::numbers::pi / 8};

  void validate() const {
    for (const Interval* iv : {&dx, &dy, &dz, &droll, &dpitch, &dyaw}) {
      require(std::isfinite(iv->lo) && std::isfinite(iv->hi) && iv->lo <= iv->hi, Errc::invalid_argument,
              "offset interval must satisfy low <= high");
    }
  }
};

/// Retreat frame relative to the grasp frame: +x points back along the
/// approach axis (away from the object), +y is the closing axis, +z is the
/// grasp frame's +x. Offsets sampled here therefore pull the gripper back
/// for dx > 0 and roll it about its own approach axis for droll.
inline Quat offset_frame() {
  Mat3 m;
  m.col(0) = -Vec3::UnitZ();
  m.col(1) = Vec3::UnitY();
  m.col(2) = Vec3::UnitX();
  return Quat(m);
}

struct OffsetSample {
  double dx = 0.0, dy = 0.0, dz = 0.0;
  double droll = 0.0, dpitch = 0.0, dyaw = 0.0;

  /// The offset as a transform in the grasp frame.
  Pose to_pose() const {
    const Quat c = offset_frame();
    const Quat r = rpy_to_rotation({droll, dpitch, dyaw});
    return Pose(c * r * c.conjugate(), c * Vec3(dx, dy, dz));
  }

  /// Recovers the components from a grasp-frame offset transform.
  static OffsetSample from_pose(const Pose& delta) {
    const Quat c = offset_frame();
    const Vec3 t = c.conjugate() * delta.translation();
    const EulerRPY e = rotation_to_rpy(c.conjugate() * delta.rotation() * c);
    return {t.x(), t.y(), t.z(), e.roll, e.pitch, e.yaw};
  }

  bool within(const OffsetRanges& r) const {
    return r.dx.contains(dx) && r.dy.contains(dy) && r.dz.contains(dz) && r.droll.contains(droll) &&
           r.dpitch.contains(dpitch) && r.dyaw.contains(dyaw);
  }
};

inline OffsetSample draw_offset(const OffsetRanges& r, Rng& rng) {
  r.validate();
  OffsetSample s;
  s.dx = rng.uniform(r.dx.lo, r.dx.hi);
  s.dy = rng.uniform(r.dy.lo, r.dy.hi);
  s.dz = rng.uniform(r.dz.lo, r.dz.hi);
  s.droll = rng.uniform(r.droll.lo, r.droll.hi);
  s.dpitch = rng.uniform(r.dpitch.lo, r.dpitch.hi);
  s.dyaw = rng.uniform(r.dyaw.lo, r.dyaw.hi);
  return s;
}

inline Pose sample_offset(const OffsetRanges& r, std::uint64_t seed) {
  Rng rng(seed, Stream::offsets);
  return draw_offset(r, rng).to_pose();
}

/// g_app = g * dT: the offset acts in the grasp's local frame.
inline Pose approach_pose(const Pose& g, const Pose& delta) { return g * delta; }

/// Rule-based phase of a single step. v = target - ee position, a = ee +z.
/// PIP iff |v| <= dist_thresh and angle(a, v) <= angle_thresh; both bounds
/// are inclusive. A step sitting exactly on the target is PIP.
inline Phase step_phase(const TrajectoryStep& step, const Vec3& target, const SegmentationConfig& cfg) {
  static constexpr double kBoundarySlack = 1e-12;
  const Vec3 v = target - step.ee_pose.translation();
  const double dist = v.norm();
  if (dist > cfg.dist_thresh + kBoundarySlack) return Phase::srp;
  if (dist == 0.0) return Phase::pip;
  return angle_between(step.ee_pose.axis(2), v) <= cfg.angle_thresh + kBoundarySlack ? Phase::pip : Phase::srp;
}

struct Segment {
  Phase phase = Phase::srp;
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive

  std::size_t length() const { return last - first + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentedTrajectory {
  Trajectory trajectory;
  std::vector<Segment> segments;
};

/// Per-step phases. Rule labels everywhere, except that a PIP step followed
/// by a detected interaction end makes every step in between PIP; after the
/// end the rule takes over again, so several SRP/PIP alternations are
/// possible. Without an interaction end the rule labels stand.
inline std::vector<Phase> phase_labels(const Trajectory& traj, const SegmentationConfig& cfg) {
  cfg.validate();
  traj.validate();
  const std::size_t n = traj.size();
  std::vector<Phase> labels(n);

  if (cfg.use_ground_truth) {
    bool complete = true;
    for (const auto& s : traj.steps) complete = complete && s.gt_phase.has_value();
    if (complete) {
      for (std::size_t i = 0; i < n; ++i) labels[i] = *traj.steps[i].gt_phase;
      return labels;
    }
  }

  for (std::size_t i = 0; i < n; ++i) labels[i] = step_phase(traj.steps[i], target_at(traj, i), cfg);

  std::size_t i = 0;
  while (i < n) {
    if (labels[i] != Phase::pip) {
      ++i;
      continue;
    }
    const auto end = find_interaction_end(traj, i, cfg);
    if (!end) break;
    for (std::size_t j = i; j <= *end; ++j) labels[j] = Phase::pip;
    i = *end + 1;
  }
  return labels;
}

inline std::vector<Segment> run_length_segments(const std::vector<Phase>& labels) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (out.empty() || out.back().phase != labels[i]) {
      out.push_back({labels[i], i, i});
    } else {
      out.back().last = i;
    }
  }
  return out;
}

inline SegmentedTrajectory segment(const Trajectory& traj, const SegmentationConfig& cfg = {}) {
  return {traj, run_length_segments(phase_labels(traj, cfg))};
}

/// Coverage and alternation check for a segment list over n steps.
inline bool is_partition(const std::vector<Segment>& segs, std::size_t n) {
  if (segs.empty()) return n == 0;
  if (segs.front().first != 0 || segs.back().last + 1 != n) return false;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (segs[k].last < segs[k].first) return false;
    if (k > 0 && (segs[k].first != segs[k - 1].last + 1 || segs[k].phase == segs[k - 1].phase)) return false;
  }
  return true;
}

}  // namespace graspmix
