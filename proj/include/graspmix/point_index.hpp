#pragma once

// Bounding-volume hierarchy over a fixed set of points. Queries are posed in
// the frame of an oriented box, which is what the gripper model needs:
// "any point strictly inside this box", "visit points in this box", and
// nearest-neighbour with lowest-index tie breaking.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "graspmix/geom.hpp"

namespace graspmix {

/// Box given in a local frame: centre and half extents.
struct LocalBox {
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Zero();

  /// Points within this distance of a face count as on the face.
  static constexpr double kFaceSlack = 1e-12;

  /// Open-box membership: points on a face are outside. The slack absorbs
  /// rounding in centre/extent arithmetic, so a point placed on a face by
  /// construction is not reported inside.
  bool strictly_contains(const Vec3& p) const {
    return ((p - center).cwiseAbs().array() < half.array() - kFaceSlack).all();
  }
  bool contains(const Vec3& p) const {
    return ((p - center).cwiseAbs().array() <= half.array()).all();
  }
};

class PointIndex {
 public:
  static constexpr std::size_t kLeafSize = 16;

  PointIndex() = default;

  explicit PointIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
    if (!points_.empty()) {
      nodes_.reserve(2 * points_.size() / kLeafSize + 2);
      build(0, points_.size());
    }
    sorted_.reserve(points_.size());
    for (auto i : order_) sorted_.push_back(points_[i]);
  }

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// True iff some point p satisfies box.strictly_contains(frame.to_local(p)).
  bool any_strictly_inside(const Pose& frame, const LocalBox& box) const {
    bool hit = false;
    visit_box(frame, box, [&](std::size_t, const Vec3& local) {
      if (box.strictly_contains(local)) {
        hit = true;
        return false;
      }
      return true;
    });
    return hit;
  }

  /// Calls fn(index, local_point) for every point whose local coordinates
  /// may lie in the closed box; fn filters exactly. Returning false stops.
  template <class Fn>
  void visit_box(const Pose& frame, const LocalBox& box, Fn&& fn) const {
    if (nodes_.empty()) return;
    const Mat3 rt = frame.rotation_matrix().transpose();
    const Mat3 rt_abs = rt.cwiseAbs();
    const Vec3 origin = frame.translation();
    std::size_t stack[64];
    std::size_t top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      const Vec3 c_local = rt * (0.5 * (node.min + node.max) - origin);
      const Vec3 h_local = rt_abs * (0.5 * (node.max - node.min));
      const Vec3 gap = (c_local - box.center).cwiseAbs() - h_local - box.half;
      if ((gap.array() > kCullSlack).any()) continue;
      if (node.leaf) {
        for (std::size_t k = node.begin; k < node.end; ++k) {
          const Vec3 local = rt * (sorted_[k] - origin);
          if (!fn(static_cast<std::size_t>(order_[k]), local)) return;
        }
      } else {
        stack[top++] = node.right;
        stack[top++] = node.left;
      }
    }
  }

  /// Index of the point nearest to q; ties go to the lowest index.
  std::size_t nearest(const Vec3& q) const {
    require(!nodes_.empty(), Errc::empty_input, "nearest-point query on an empty cloud");
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t stack[64];
    std::size_t top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      const Vec3 outside = (node.min - q).cwiseMax(q - node.max).cwiseMax(0.0);
      if (outside.squaredNorm() > best_d2) continue;
      if (node.leaf) {
        for (std::size_t k = node.begin; k < node.end; ++k) {
          const double d2 = (sorted_[k] - q).squaredNorm();
          const std::size_t idx = order_[k];
          if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
          }
        }
      } else {
        // Descend into the closer child first.
        const Node& l = nodes_[node.left];
        const Node& r = nodes_[node.right];
        const double dl = (l.min - q).cwiseMax(q - l.max).cwiseMax(0.0).squaredNorm();
        const double dr = (r.min - q).cwiseMax(q - r.max).cwiseMax(0.0).squaredNorm();
        if (dl <= dr) {
          stack[top++] = node.right;
          stack[top++] = node.left;
        } else {
          stack[top++] = node.left;
          stack[top++] = node.right;
        }
      }
    }
    return best;
  }

 private:
  static constexpr double kCullSlack = 1e-12;

  struct Node {
    Vec3 min;
    Vec3 max;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    bool leaf = false;
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    Node node;
    node.begin = begin;
    node.end = end;
    node.min = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.max = -node.min;
    for (std::size_t k = begin; k < end; ++k) {
      node.min = node.min.cwiseMin(points_[order_[k]]);
      node.max = node.max.cwiseMax(points_[order_[k]]);
    }
    const std::size_t id = nodes_.size();
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
      nodes_[id].leaf = true;
      return id;
    }
    int axis = 0;
    (node.max - node.min).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::uint32_t a, std::uint32_t b) {
                       const double pa = points_[a][axis];
                       const double pb = points_[b][axis];
                       return pa < pb || (pa == pb && a < b);
                     });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  std::vector<Vec3> points_;
  std::vector<Vec3> sorted_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace graspmix
