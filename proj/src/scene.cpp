#include "ncpano/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <random>
#include <string>

#include "ncpano/error.hpp"

namespace ncpano {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}  // namespace

VisibleHit visible_wall(const Layout& layout, const Vec2& origin,
                        double azimuth) {
  const Vec2 dir(std::cos(azimuth), std::sin(azimuth));
  constexpr double kEps = 1e-12;
  VisibleHit best;
  best.t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < layout.wall_count(); ++i) {
    const Vec2 a = layout.edge_start(i);
    const Vec2 edge = layout.edge_end(i) - a;
    const double denom = cross2(dir, edge);
    if (std::abs(denom) <= kEps * edge.norm()) continue;
    const Vec2 rel = a - origin;
    const double t = cross2(rel, edge) / denom;
    const double s = cross2(rel, dir) / denom;
    if (t <= kEps || s < -kEps || s > 1.0 + kEps) continue;
    if (t < best.t) best = {i, t};
  }
  if (!std::isfinite(best.t)) {
    fail(ErrorCode::kInternal,
         "ray cast hit no wall: origin is not inside the footprint");
  }
  return best;
}

void BoundaryObservation::validate() const {
  camera.validate();
  const auto n = static_cast<std::size_t>(camera.width);
  if (theta_ceiling.size() != n || theta_floor.size() != n ||
      corner_prob.size() != n) {
    fail(ErrorCode::kInvalidArgument,
         "observation arrays must all have length camera.width = " +
             std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(theta_ceiling[i] > 0.0 && theta_ceiling[i] < kHalfPi) ||
        !(theta_floor[i] < 0.0 && theta_floor[i] > -kHalfPi)) {
      fail(ErrorCode::kInvalidArgument,
           "boundary elevations out of range at column " + std::to_string(i));
    }
    if (!(corner_prob[i] >= 0.0 && corner_prob[i] <= 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           "corner probability outside [0,1] at column " + std::to_string(i));
    }
  }
}

RenderResult render_with_labels(const Layout& layout, const CameraRig& rig) {
  rig.validate();
  layout.validate(rig.radius);
  const auto n = static_cast<std::size_t>(rig.width);
  RenderResult out;
  BoundaryObservation& obs = out.observation;
  obs.camera = rig;
  obs.theta_ceiling.resize(n);
  obs.theta_floor.resize(n);
  obs.corner_prob.assign(n, 0.0);
  out.wall_of_column.resize(n);
  for (std::size_t col = 0; col < n; ++col) {
    const double phi = rig.azimuth(static_cast<double>(col));
    const Vec2 center = rig.center(phi).head<2>();
    const VisibleHit hit = visible_wall(layout, center, phi);
    out.wall_of_column[col] = hit.wall;
    obs.theta_ceiling[col] = std::atan2(layout.h_c, hit.t);
    obs.theta_floor[col] = std::atan2(layout.h_f, hit.t);
  }
  for (std::size_t col = 0; col < n; ++col) {
    if (out.wall_of_column[col] != out.wall_of_column[(col + n - 1) % n]) {
      obs.corner_prob[col] = 1.0;
    }
  }
  return out;
}

BoundaryObservation render_boundaries(const Layout& layout,
                                      const CameraRig& rig) {
  return render_with_labels(layout, rig).observation;
}

BoundaryObservation add_noise(const BoundaryObservation& obs,
                              const NoiseOptions& options) {
  if (!(options.sigma_px >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "noise sigma must be non-negative");
  }
  BoundaryObservation out = obs;
  const double sigma = options.sigma_px * obs.camera.row_step();
  // Keep boundaries strictly inside (0, pi/2) / (-pi/2, 0).
  const double margin = 0.25 * obs.camera.row_step();
  if (sigma > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (std::size_t i = 0; i < out.theta_ceiling.size(); ++i) {
      out.theta_ceiling[i] = std::clamp(out.theta_ceiling[i] + gauss(rng),
                                        margin, kHalfPi - margin);
      out.theta_floor[i] = std::clamp(out.theta_floor[i] + gauss(rng),
                                      -kHalfPi + margin, -margin);
    }
  }
  if (options.blur_corners) {
    const int n = static_cast<int>(obs.corner_prob.size());
    constexpr int kHalf = 2;
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int k = -kHalf; k <= kHalf; ++k) {
        const double w = 1.0 - std::abs(k) / (kHalf + 1.0);
        v = std::max(v, w * obs.corner_prob[((i + k) % n + n) % n]);
      }
      out.corner_prob[i] = v;
    }
  }
  return out;
}

BoundaryObservation add_noise(const BoundaryObservation& obs, double sigma_px,
                              std::uint64_t seed) {
  return add_noise(obs, NoiseOptions{sigma_px, seed, false});
}

std::vector<ColumnRange> segment_columns(const BoundaryObservation& obs,
                                         double threshold,
                                         int min_separation) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "corner threshold must be in (0, 1)");
  }
  const int n = static_cast<int>(obs.corner_prob.size());
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    if (obs.corner_prob[i] > threshold) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return obs.corner_prob[a] > obs.corner_prob[b];
  });
  std::vector<int> corners;
  for (int c : candidates) {
    const bool suppressed = std::any_of(
        corners.begin(), corners.end(), [&](int k) {
          const int gap = std::abs(c - k);
          return std::min(gap, n - gap) < min_separation;
        });
    if (!suppressed) corners.push_back(c);
  }
  if (corners.size() < 3) {
    fail(ErrorCode::kSegmentation,
         "found " + std::to_string(corners.size()) +
             " wall-wall corners; a closed layout needs at least 3");
  }
  std::sort(corners.begin(), corners.end());
  std::vector<ColumnRange> segments;
  segments.reserve(corners.size());
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const int begin = corners[k];
    const int end = corners[(k + 1) % corners.size()];
    const int length = ((end - begin) % n + n) % n;
    segments.push_back({begin, length == 0 ? n : length});
  }
  return segments;
}

}  // namespace ncpano
