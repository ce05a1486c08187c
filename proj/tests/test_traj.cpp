#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "graspmix/synth.hpp"
#include "graspmix/traj.hpp"

using namespace graspmix;

namespace {

constexpr double kPi = std::numbers::pi;

// Step at the origin looking along +z, target placed at distance d and
// angle a from the approach axis.
std::pair<TrajectoryStep, Vec3> probe(double d, double a) {
  TrajectoryStep s;
  s.ee_pose = Pose();
  return {s, Vec3(d * std::sin(a), 0.0, d * std::cos(a))};
}

Trajectory line_trajectory(const Vec3& from, const Vec3& to, std::size_t n, const Vec3& target) {
  Trajectory t;
  t.target_init_pose = Pose::from_translation(target);
  for (std::size_t i = 0; i < n; ++i) {
    TrajectoryStep s;
    s.t = 0.1 * i;
    const double f = static_cast<double>(i) / (n - 1);
    s.ee_pose = Pose(Quat(Eigen::AngleAxisd(kPi, Vec3::UnitX())), from + f * (to - from));
    s.gripper_open = 1.0;
    t.steps.push_back(s);
  }
  return t;
}

}  // namespace

// ------------------------------------------------------------ step_phase

TEST(StepPhase, InsideBallAndCone) {
  const auto [s, t] = probe(0.15, kPi / 6);
  EXPECT_EQ(step_phase(s, t, {}), Phase::pip);
}

TEST(StepPhase, TooFar) {
  const auto [s, t] = probe(0.25, 0.0);
  EXPECT_EQ(step_phase(s, t, {}), Phase::srp);
}

TEST(StepPhase, WrongDirection) {
  const auto [s, t] = probe(0.1, kPi / 2);
  EXPECT_EQ(step_phase(s, t, {}), Phase::srp);
}

TEST(StepPhase, BoundaryIsInclusive) {
  const auto [s, t] = probe(0.2, kPi / 3);
  EXPECT_EQ(step_phase(s, t, {}), Phase::pip);
}

// ------------------------------------------------------------ offsets

TEST(Offset, CollapsedRangesGiveIdentity) {
  OffsetRanges r;
  for (Interval* iv : {&r.dx, &r.dy, &r.dz, &r.droll, &r.dpitch, &r.dyaw}) *iv = {0.0, 0.0};
  const Pose p = sample_offset(r, 42);
  EXPECT_EQ(rotation_angle(p.rotation()), 0.0);
  EXPECT_EQ(p.translation().norm(), 0.0);
}

TEST(Offset, DefaultRangesMatchTable) {
  const OffsetRanges r;
  EXPECT_EQ(r.dx.lo, 0.0);
  EXPECT_EQ(r.dx.hi, 0.15);
  EXPECT_EQ(r.dy.lo, -0.05);
  EXPECT_EQ(r.dz.hi, 0.05);
  EXPECT_EQ(r.droll.hi, kPi / 4);
  EXPECT_EQ(r.dpitch.lo, -kPi / 8);
  EXPECT_EQ(r.dyaw.hi, kPi / 8);
}

TEST(Offset, UniformMeansWithinThreeSigma) {
  const OffsetRanges r;
  const int n = 10000;
  std::array<double, 6> sum{};
  Rng rng(2024, Stream::offsets);
  for (int i = 0; i < n; ++i) {
    const OffsetSample s = draw_offset(r, rng);
    ASSERT_TRUE(s.within(r));
    ASSERT_GE(s.dx, 0.0);
    const std::array<double, 6> v{s.dx, s.dy, s.dz, s.droll, s.dpitch, s.dyaw};
    for (int k = 0; k < 6; ++k) sum[k] += v[k];
  }
  const std::array<const Interval*, 6> ivs{&r.dx, &r.dy, &r.dz, &r.droll, &r.dpitch, &r.dyaw};
  for (int k = 0; k < 6; ++k) {
    const double width = ivs[k]->hi - ivs[k]->lo;
    const double sigma_mean = width / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    EXPECT_LE(std::abs(sum[k] / n - ivs[k]->mid()), 3.0 * sigma_mean) << k;
  }
}

TEST(Offset, SamplePoseRecoversComponents) {
  const OffsetRanges r;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Pose p = sample_offset(r, seed);
    const OffsetSample s = OffsetSample::from_pose(p);
    EXPECT_TRUE(s.within(r));
    const auto [ang, dist] = pose_distance(s.to_pose(), p);
    EXPECT_LT(ang, 1e-9);
    EXPECT_LT(dist, 1e-12);
  }
}

TEST(Offset, PositiveDxRetreatsAlongApproach) {
  OffsetSample s;
  s.dx = 0.1;
  const Pose p = s.to_pose();
  EXPECT_LT((p.translation() - Vec3(0, 0, -0.1)).norm(), 1e-15);
}

TEST(Offset, Deterministic) {
  const auto a = sample_offset({}, 5), b = sample_offset({}, 5);
  EXPECT_EQ(a.translation(), b.translation());
  EXPECT_EQ(a.rotation().coeffs(), b.rotation().coeffs());
}

// ------------------------------------------------------------ approach pose

TEST(ApproachPose, IdentityOffset) {
  std::mt19937_64 gen(1);
  const Pose g = fixtures::random_pose(gen);
  const auto [ang, dist] = pose_distance(approach_pose(g, Pose()), g);
  EXPECT_LT(ang, 1e-12);
  EXPECT_LT(dist, 1e-12);
}

TEST(ApproachPose, PureTranslationFromIdentity) {
  const Pose a = approach_pose(Pose(), Pose::from_translation(Vec3(0.15, 0, 0)));
  EXPECT_LT((a.translation() - Vec3(0.15, 0, 0)).norm(), 1e-15);
}

TEST(ApproachPose, LeftCancellation) {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 10000; ++i) {
    const Pose g = fixtures::random_pose(gen);
    const Pose dt = sample_offset({}, static_cast<std::uint64_t>(i));
    const auto [ang, dist] = pose_distance(g.inverse() * approach_pose(g, dt), dt);
    ASSERT_LT(ang, 1e-9);
    ASSERT_LT(dist, 1e-9);
  }
}

// ------------------------------------------------------------ segmentation

TEST(Segment, NeverNearTargetIsSingleSrp) {
  const auto t = line_trajectory(Vec3(0.4, 0.4, 0.5), Vec3(-0.4, 0.4, 0.5), 30, Vec3::Zero());
  const auto s = segment(t);
  ASSERT_EQ(s.segments.size(), 1u);
  EXPECT_EQ(s.segments[0], (Segment{Phase::srp, 0, 29}));
}

TEST(Segment, DescentGivesSrpThenPip) {
  const auto t = line_trajectory(Vec3(0, 0, 0.6), Vec3(0, 0, 0.05), 56, Vec3::Zero());
  const auto s = segment(t);
  ASSERT_EQ(s.segments.size(), 2u);
  EXPECT_EQ(s.segments[0].phase, Phase::srp);
  EXPECT_EQ(s.segments[1].phase, Phase::pip);
  // first step within 0.2 m: z <= 0.2
  for (std::size_t i = 0; i < t.size(); ++i) {
    const bool inside = t.steps[i].ee_pose.translation().z() <= 0.2 + 1e-12;
    EXPECT_EQ(i >= s.segments[1].first, inside) << i;
  }
}

TEST(Segment, TooShortRejected) {
  Trajectory t;
  t.steps.resize(1);
  try {
    segment(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_trajectory);
  }
}

TEST(Segment, MissingTargetRejected) {
  auto t = line_trajectory(Vec3(0, 0, 0.6), Vec3(0, 0, 0.05), 10, Vec3::Zero());
  t.target_init_pose.reset();
  try {
    segment(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_target);
  }
}

TEST(Segment, PartitionIdempotentMonotone) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SynthTaskSpec spec;
    spec.seed = seed;
    const auto traj = add_position_noise(gen_full(spec), 0.01, seed);
    const auto a = segment(traj);
    EXPECT_TRUE(is_partition(a.segments, traj.size()));
    std::size_t total = 0;
    for (const auto& s : a.segments) total += s.length();
    EXPECT_EQ(total, traj.size());
    EXPECT_EQ(segment(a.trajectory).segments, a.segments);

    SegmentationConfig wide;
    wide.dist_thresh = 0.3;
    const auto narrow_labels = phase_labels(traj, {});
    const auto wide_labels = phase_labels(traj, wide);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (narrow_labels[i] == Phase::pip) {
        EXPECT_EQ(wide_labels[i], Phase::pip) << seed << " " << i;
      }
    }
  }
}

TEST(Segment, InteractionEndRevertsToRule) {
  // Descend, close, lift the target far away along x: after the interaction
  // end, steps far from the moved target are SRP again.
  Trajectory t;
  t.target_init_pose = Pose::from_translation(Vec3::Zero());
  const Quat down(Eigen::AngleAxisd(kPi, Vec3::UnitX()));
  double time = 0.0;
  auto push = [&](const Vec3& p, double grip, const Vec3& target) {
    TrajectoryStep s;
    s.t = time;
    time += 0.1;
    s.ee_pose = Pose(down, p);
    s.gripper_open = grip;
    s.target_position = target;
    t.steps.push_back(s);
  };
  for (int i = 0; i <= 10; ++i) push(Vec3(0, 0, 0.5 - 0.045 * i), 1.0, Vec3::Zero());  // z 0.5 -> 0.05
  for (int i = 0; i < 3; ++i) push(Vec3(0, 0, 0.05), 0.0, Vec3::Zero());
  for (int i = 1; i <= 5; ++i) push(Vec3(0, 0, 0.05 + 0.01 * i), 0.0, Vec3(0, 0, 0.01 * i));
  // gripper re-opens far from the object after dropping it
  for (int i = 1; i <= 5; ++i) push(Vec3(0.1 * i, 0, 0.5), 1.0, Vec3(0, 0, 0.05));
  const auto s = segment(t);
  ASSERT_EQ(s.segments.size(), 3u);
  EXPECT_EQ(s.segments[0].phase, Phase::srp);
  EXPECT_EQ(s.segments[1].phase, Phase::pip);
  EXPECT_EQ(s.segments[2].phase, Phase::srp);
  const auto end = find_interaction_end(t, s.segments[1].first, {});
  ASSERT_TRUE(end.has_value());
  EXPECT_LE(*end, s.segments[1].last);
}

TEST(Segment, SrpOnlyEndsInPipExactlyWhenRuleHolds) {
  std::size_t both = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SynthTaskSpec spec;
    spec.seed = seed;
    const auto traj = gen_srp_only(spec);
    const auto& last = traj.steps.back();
    const Phase rule = step_phase(last, target_at(traj, traj.size() - 1), {});
    const auto s = segment(traj);
    EXPECT_EQ(s.segments.back().phase, rule);
    if (rule == Phase::pip) {
      ASSERT_EQ(s.segments.size(), 2u) << seed;
      EXPECT_EQ(s.segments[0].phase, Phase::srp);
      ++both;
    }
  }
  EXPECT_GT(both, 50u);
}

TEST(Segment, GroundTruthOverride) {
  SynthTaskSpec spec;
  spec.seed = 3;
  auto traj = gen_full(spec);
  for (auto& s : traj.steps) s.gt_phase = Phase::srp;
  SegmentationConfig cfg;
  cfg.use_ground_truth = true;
  const auto seg = segment(traj, cfg);
  ASSERT_EQ(seg.segments.size(), 1u);
  EXPECT_EQ(seg.segments[0].phase, Phase::srp);
}

TEST(Segment, PartitionChecker) {
  EXPECT_TRUE(is_partition({{Phase::srp, 0, 3}, {Phase::pip, 4, 9}}, 10));
  EXPECT_FALSE(is_partition({{Phase::srp, 0, 3}, {Phase::pip, 5, 9}}, 10));
  EXPECT_FALSE(is_partition({{Phase::srp, 0, 3}, {Phase::srp, 4, 9}}, 10));
  EXPECT_FALSE(is_partition({{Phase::srp, 0, 3}, {Phase::pip, 4, 8}}, 10));
}
