#pragma once

// Scaling-law fits and corpus statistics.
//
//   log-proportion:  sr = k ln(1 - p) + b,  knee p* = 1 - k  (where dSR/dp = -1)
//   log-count:       sr = a ln(N) + c
//
// Both are unweighted ordinary least squares in the transformed abscissa.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/traj.hpp"

namespace graspmix {

struct ScalingPoint {
  double x = 0.0;   // p_SRP in [0, 1) or a count N >= 1
  double sr = 0.0;  // success rate
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
};

/// Least squares y = slope * u + intercept using centred sums.
inline LineFit fit_line(std::span<const double> u, std::span<const double> y) {
  const std::size_t n = u.size();
  require(n == y.size(), Errc::invalid_argument, "abscissa and ordinate sizes differ");
  require(n >= 2, Errc::rank_deficient, "a line fit needs at least two points");
  double mu = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    my += y[i];
  }
  mu /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (y[i] - my);
  }
  require(suu > 0.0, Errc::rank_deficient, "all abscissae are identical");
  LineFit f;
  f.slope = suy / suu;
  f.intercept = my - f.slope * mu;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * u[i] + f.intercept);
    f.rss += r * r;
  }
  return f;
}

struct LogProportionFit {
  double k = 0.0;
  double b = 0.0;
  double p_star = 0.0;       // 1 - k
  bool p_star_valid = false; // k in (0, 1)
  double rss = 0.0;
  std::size_t n_points = 0;

  double predict(double p) const { return k * std::log1p(-p) + b; }
};

inline LogProportionFit fit_log_proportion(std::span<const ScalingPoint> points) {
  std::vector<double> u, y;
  u.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    require(std::isfinite(p.x) && std::isfinite(p.sr), Errc::domain, "non-finite scaling point");
    require(p.x >= 0.0 && p.x < 1.0, Errc::domain, "proportion must lie in [0, 1), got " + std::to_string(p.x));
    u.push_back(std::log1p(-p.x));
    y.push_back(p.sr);
  }
  const LineFit line = fit_line(u, y);
  LogProportionFit f;
  f.k = line.slope;
  f.b = line.intercept;
  f.rss = line.rss;
  f.n_points = points.size();
  f.p_star = 1.0 - f.k;
  f.p_star_valid = f.k > 0.0 && f.k < 1.0;
  return f;
}

struct LogCountFit {
  double a = 0.0;
  double c = 0.0;
  double rss = 0.0;
  std::size_t n_points = 0;

  double predict(double n) const { return a * std::log(n) + c; }
};

inline LogCountFit fit_log_count(std::span<const ScalingPoint> points) {
  std::vector<double> u, y;
  u.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    require(std::isfinite(p.x) && std::isfinite(p.sr), Errc::domain, "non-finite scaling point");
    require(p.x >= 1.0, Errc::domain, "count must be >= 1, got " + std::to_string(p.x));
    u.push_back(std::log(p.x));
    y.push_back(p.sr);
  }
  const LineFit line = fit_line(u, y);
  return {line.slope, line.intercept, line.rss, points.size()};
}

struct CorpusStats {
  std::size_t full_trajectories = 0;
  std::size_t srp_only_trajectories = 0;
  std::size_t srp_segments = 0;
  std::size_t pip_segments = 0;
  double mean_srp_segment_length = 0.0;
  double mean_pip_segment_length = 0.0;
  double mean_full_length = 0.0;
  double mean_srp_only_length = 0.0;
  std::optional<double> full_to_srp_length_ratio;  // needs both kinds
};

inline CorpusStats corpus_stats(std::span<const SegmentedTrajectory> corpus) {
  require(!corpus.empty(), Errc::empty_input, "corpus is empty");
  CorpusStats s;
  double srp_len = 0.0, pip_len = 0.0, full_len = 0.0, srp_only_len = 0.0;
  for (const auto& st : corpus) {
    const auto n = static_cast<double>(st.trajectory.size());
    if (st.trajectory.source == Source::full) {
      ++s.full_trajectories;
      full_len += n;
    } else {
      ++s.srp_only_trajectories;
      srp_only_len += n;
    }
    for (const auto& seg : st.segments) {
      if (seg.phase == Phase::srp) {
        ++s.srp_segments;
        srp_len += static_cast<double>(seg.length());
      } else {
        ++s.pip_segments;
        pip_len += static_cast<double>(seg.length());
      }
    }
  }
  auto mean = [](double total, std::size_t count) { return count ? total / static_cast<double>(count) : 0.0; };
  s.mean_srp_segment_length = mean(srp_len, s.srp_segments);
  s.mean_pip_segment_length = mean(pip_len, s.pip_segments);
  s.mean_full_length = mean(full_len, s.full_trajectories);
  s.mean_srp_only_length = mean(srp_only_len, s.srp_only_trajectories);
  if (s.full_trajectories > 0 && s.srp_only_trajectories > 0) {
    s.full_to_srp_length_ratio = s.mean_full_length / s.mean_srp_only_length;
  }
  return s;
}

}  // namespace graspmix
