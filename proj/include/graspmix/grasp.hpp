#pragma once

// Grasp-label annotation on point clouds.
//
// Candidates are built from surface seeds, Fibonacci-lattice approach
// directions, in-plane rolls over a half turn and a list of bite depths,
// then filtered by a three-box gripper collision model, a minimum bite depth
// and a two-contact friction-cone test.
//
// Grasp frame: origin at the centre of the finger tips, +z along the approach
// direction (towards the object), +y along the finger closing axis. The
// fingers occupy -L <= z <= 0 on either side of the gap; the palm sits behind
// them.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/geom.hpp"
#include "graspmix/parallel.hpp"
#include "graspmix/point_index.hpp"
#include "graspmix/rng.hpp"

namespace graspmix {

struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  Direction normal;  // outward
};

struct PointCloud {
  std::vector<SurfacePoint> points;
  std::string object_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void validate() const {
    for (const auto& p : points) {
      require(is_finite(p.position), Errc::invalid_argument, "point cloud has non-finite coordinates");
    }
  }

  /// The same cloud expressed in a new frame: positions mapped through t,
  /// normals rotated.
  PointCloud transformed(const Pose& t) const {
    PointCloud out;
    out.object_id = object_id;
    out.points.reserve(points.size());
    for (const auto& p : points) {
      out.points.push_back({t * p.position, Direction::normalized(t.rotation() * p.normal.vec())});
    }
    return out;
  }
};

/// Three-box parallel-jaw model. Extents are full box sizes in the grasp
/// frame as (x, y, z): x across the finger pad, y along the closing axis,
/// z along the approach.
struct GripperModel {
  Vec3 finger_extents{0.02, 0.01, 0.04};
  Vec3 palm_extents{0.03, 0.08, 0.03};
  double opening = 0.08;        // gap between the inner finger faces, w
  double finger_length = 0.04;  // depth of the closing region, L
  double min_bite = 0.005;      // d_min

  void validate() const {
    require((finger_extents.array() > 0.0).all() && (palm_extents.array() > 0.0).all(), Errc::invalid_argument,
            "gripper box extents must be positive");
    require(opening > 0.0, Errc::invalid_argument, "gripper opening must be positive");
    require(finger_length > 0.0, Errc::invalid_argument, "finger length must be positive");
    require(min_bite > 0.0 && min_bite < finger_length, Errc::invalid_argument,
            "minimum bite depth must lie in (0, finger length)");
  }

  /// side = +1 for the finger on +y, -1 for the finger on -y.
  LocalBox finger_box(int side) const {
    return {Vec3(0.0, side * (0.5 * opening + 0.5 * finger_extents.y()), -0.5 * finger_extents.z()),
            0.5 * finger_extents};
  }

  LocalBox palm_box() const {
    return {Vec3(0.0, 0.0, -finger_length - 0.5 * palm_extents.z()), 0.5 * palm_extents};
  }

  /// Region swept between the finger pads: |x| <= pad/2, |y| <= w/2, -L <= z <= 0.
  LocalBox closing_region() const {
    return {Vec3(0.0, 0.0, -0.5 * finger_length),
            Vec3(0.5 * finger_extents.x(), 0.5 * opening, 0.5 * finger_length)};
  }

  Vec3 inner_face_center(int side) const {
    return {0.0, side * 0.5 * opening, -0.5 * finger_extents.z()};
  }
};

struct AnnotationParams {
  std::size_t n_approach = 64;                   // N
  std::size_t k_rolls = 12;                      // K
  std::size_t m_seeds = 256;                     // M
  std::vector<double> depths{0.01, 0.02, 0.03};  // D values, meters
  double mu = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    require(n_approach >= 1 && k_rolls >= 1 && m_seeds >= 1, Errc::invalid_argument,
            "approach, roll and seed counts must be >= 1");
    require(!depths.empty(), Errc::invalid_argument, "depth list must be non-empty");
    for (double d : depths) {
      require(std::isfinite(d) && d > 0.0, Errc::invalid_argument, "depths must be positive");
    }
    require(std::isfinite(mu) && mu > 0.0, Errc::invalid_argument, "friction coefficient must be positive");
  }

  std::size_t candidate_count() const { return depths.size() * m_seeds * n_approach * k_rolls; }
};

/// Identity of a candidate within one annotation run.
struct CandidateId {
  std::size_t seed = 0;
  std::size_t approach = 0;
  std::size_t roll = 0;
  std::size_t depth = 0;

  friend bool operator==(const CandidateId&, const CandidateId&) = default;
  friend auto operator<=>(const CandidateId&, const CandidateId&) = default;
};

struct GraspCandidate {
  CandidateId id;
  Pose pose;
  Vec3 seed = Vec3::Zero();
  Direction approach;
  double depth = 0.0;
};

struct ForceClosure {
  bool closed = false;
  std::array<double, 2> margins{};  // atan(mu) - contact angle, radians
  std::array<std::size_t, 2> contacts{};
};

struct GraspLabel {
  GraspCandidate candidate;
  double bite_depth = 0.0;
  std::array<double, 2> margins{};
  std::array<std::size_t, 2> contacts{};
};

struct SeedSample {
  std::vector<std::size_t> indices;
  std::vector<SurfacePoint> points;
  bool with_replacement = false;
};

/// Cloud plus its spatial index; build once, query many times.
class IndexedCloud {
 public:
  explicit IndexedCloud(PointCloud cloud) : cloud_(std::move(cloud)) {
    cloud_.validate();
    std::vector<Vec3> pts;
    pts.reserve(cloud_.size());
    for (const auto& p : cloud_.points) pts.push_back(p.position);
    index_ = PointIndex(pts);
  }

  const PointCloud& cloud() const { return cloud_; }
  const PointIndex& index() const { return index_; }
  std::size_t size() const { return cloud_.size(); }

 private:
  PointCloud cloud_;
  PointIndex index_;
};

/// m seed points; without replacement when m <= |cloud|, otherwise with
/// replacement (and flagged).
inline SeedSample sample_seed_points(const PointCloud& cloud, std::size_t m, std::uint64_t seed) {
  require(!cloud.empty(), Errc::empty_input, "cannot sample seeds from an empty cloud");
  require(m >= 1, Errc::invalid_argument, "seed count must be >= 1");
  Rng rng(seed, Stream::grasp_seeds);
  SeedSample out;
  if (m <= cloud.size()) {
    out.indices = sample_without_replacement(cloud.size(), m, rng);
  } else {
    out.with_replacement = true;
    out.indices.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.indices.push_back(rng.index(cloud.size()));
  }
  out.points.reserve(m);
  for (auto i : out.indices) out.points.push_back(cloud.points[i]);
  return out;
}

namespace detail {

/// Approach directions and (approach, roll) rotations shared by every seed.
struct RotationLattice {
  std::vector<Direction> approaches;  // expressed in the parent frame
  std::vector<Quat> rotations;        // index approach * K + roll

  RotationLattice(const AnnotationParams& params, const Pose& frame) {
    const auto lattice = fibonacci_directions(params.n_approach);
    approaches.reserve(lattice.size());
    rotations.reserve(lattice.size() * params.k_rolls);
    for (const auto& a : lattice) {
      approaches.push_back(Direction::normalized(frame.rotation() * a.vec()));
      const Quat base = align_z(a);
      for (const auto& roll : semicircle_rotations(a, params.k_rolls)) {
        Quat q = frame.rotation() * (roll * base);
        q.normalize();
        rotations.push_back(q);
      }
    }
  }
};

template <class Fn>
void for_each_candidate(std::size_t seed_index, const Vec3& s, const RotationLattice& lattice,
                        const AnnotationParams& params, Fn&& fn) {
  const std::size_t k = params.k_rolls;
  for (std::size_t a = 0; a < lattice.approaches.size(); ++a) {
    const Vec3& dir = lattice.approaches[a].vec();
    for (std::size_t r = 0; r < k; ++r) {
      const Quat& q = lattice.rotations[a * k + r];
      for (std::size_t d = 0; d < params.depths.size(); ++d) {
        const double depth = params.depths[d];
        fn(GraspCandidate{{seed_index, a, r, d}, Pose(q, s + dir * depth), s, lattice.approaches[a], depth});
      }
    }
  }
}

}  // namespace detail

/// All D*M*N*K candidates in canonical order (seed, approach, roll, depth).
/// `frame` expresses the approach lattice; identity means the cloud frame.
inline std::vector<GraspCandidate> generate_candidates(std::span<const SurfacePoint> seeds,
                                                       const AnnotationParams& params,
                                                       const Pose& frame = Pose::identity()) {
  params.validate();
  require(!seeds.empty(), Errc::empty_input, "no seed points");
  const detail::RotationLattice lattice(params, frame);
  std::vector<GraspCandidate> out;
  out.reserve(seeds.size() * params.depths.size() * params.n_approach * params.k_rolls);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    detail::for_each_candidate(i, seeds[i].position, lattice, params,
                               [&](GraspCandidate&& c) { out.push_back(std::move(c)); });
  }
  return out;
}

/// True iff no cloud point lies strictly inside either finger box or the palm.
inline bool collision_check(const GraspCandidate& c, const IndexedCloud& cloud, const GripperModel& g) {
  const auto& idx = cloud.index();
  return !idx.any_strictly_inside(c.pose, g.finger_box(+1)) && !idx.any_strictly_inside(c.pose, g.finger_box(-1)) &&
         !idx.any_strictly_inside(c.pose, g.palm_box());
}

/// Depth of the deepest point in the closing region, measured from the
/// finger-tip plane towards the palm; 0 when the region is empty.
inline double bite_depth(const GraspCandidate& c, const IndexedCloud& cloud, const GripperModel& g) {
  const LocalBox region = g.closing_region();
  double deepest = 0.0;
  cloud.index().visit_box(c.pose, region, [&](std::size_t, const Vec3& local) {
    if (region.contains(local)) deepest = std::max(deepest, -local.z());
    return true;
  });
  return deepest;
}

/// Contacts are the cloud points nearest each finger's inner face centre
/// (lowest index on ties). The grasp closes iff the segment between them
/// lies strictly inside both friction cones: angle(n_i, p_i - p_j) < atan(mu)
/// and angle(n_j, p_j - p_i) < atan(mu).
inline ForceClosure force_closure_check(const GraspCandidate& c, const IndexedCloud& cloud, const GripperModel& g,
                                        double mu) {
  require(cloud.size() >= 2, Errc::empty_input, "force closure needs at least two points");
  require(std::isfinite(mu) && mu > 0.0, Errc::invalid_argument, "friction coefficient must be positive");
  const std::size_t i = cloud.index().nearest(c.pose * g.inner_face_center(+1));
  const std::size_t j = cloud.index().nearest(c.pose * g.inner_face_center(-1));
  const auto& pi = cloud.cloud().points[i];
  const auto& pj = cloud.cloud().points[j];
  const Vec3 between = pi.position - pj.position;
  require(i != j && between.squaredNorm() > 0.0, Errc::degenerate_contact,
          "both fingers resolve to the same contact point");
  const double cone = std::atan(mu);
  ForceClosure out;
  out.contacts = {i, j};
  out.margins = {cone - angle_between(pi.normal.vec(), between), cone - angle_between(pj.normal.vec(), -between)};
  out.closed = out.margins[0] > 0.0 && out.margins[1] > 0.0;
  return out;
}

inline bool collision_check(const GraspCandidate& c, const PointCloud& cloud, const GripperModel& g) {
  return collision_check(c, IndexedCloud(cloud), g);
}
inline double bite_depth(const GraspCandidate& c, const PointCloud& cloud, const GripperModel& g) {
  return bite_depth(c, IndexedCloud(cloud), g);
}
inline ForceClosure force_closure_check(const GraspCandidate& c, const PointCloud& cloud, const GripperModel& g,
                                        double mu) {
  return force_closure_check(c, IndexedCloud(cloud), g, mu);
}

struct AnnotationResult {
  std::vector<GraspLabel> labels;
  std::size_t candidates = 0;
  std::size_t collision_free = 0;
  std::size_t deep_enough = 0;
  bool seeds_with_replacement = false;
};

/// generate -> collision -> bite depth >= d_min -> force closure. Labels are
/// emitted in canonical candidate order for any thread count. A candidate
/// whose two contacts coincide is rejected rather than aborting the run.
inline AnnotationResult annotate(const PointCloud& cloud, const GripperModel& g, const AnnotationParams& params,
                                 unsigned threads = 1, const Pose& frame = Pose::identity()) {
  require(!cloud.empty(), Errc::empty_input, "cannot annotate an empty cloud");
  g.validate();
  params.validate();
  const IndexedCloud indexed(cloud);
  const SeedSample seeds = sample_seed_points(cloud, params.m_seeds, params.seed);
  const detail::RotationLattice lattice(params, frame);

  struct PerSeed {
    std::vector<GraspLabel> labels;
    std::size_t candidates = 0;
    std::size_t collision_free = 0;
    std::size_t deep_enough = 0;
  };
  std::vector<PerSeed> per_seed(seeds.points.size());

  parallel_for(seeds.points.size(), threads, [&](std::size_t s) {
    PerSeed& acc = per_seed[s];
    detail::for_each_candidate(s, seeds.points[s].position, lattice, params, [&](GraspCandidate&& c) {
      ++acc.candidates;
      if (!collision_check(c, indexed, g)) return;
      ++acc.collision_free;
      const double bite = bite_depth(c, indexed, g);
      if (bite < g.min_bite) return;
      ++acc.deep_enough;
      if (indexed.size() < 2) return;
      ForceClosure fc;
      try {
        fc = force_closure_check(c, indexed, g, params.mu);
      } catch (const Error& e) {
        if (e.code() == Errc::degenerate_contact) return;
        throw;
      }
      if (!fc.closed) return;
      acc.labels.push_back({std::move(c), bite, fc.margins, fc.contacts});
    });
  });

  AnnotationResult out;
  out.seeds_with_replacement = seeds.with_replacement;
  for (auto& ps : per_seed) {
    out.candidates += ps.candidates;
    out.collision_free += ps.collision_free;
    out.deep_enough += ps.deep_enough;
    for (auto& l : ps.labels) out.labels.push_back(std::move(l));
  }
  return out;
}

}  // namespace graspmix
