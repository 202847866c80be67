#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "ncpano/error.hpp"
#include "solver_internal.hpp"

namespace ncpano {

namespace {

// A vertical plane {x : normal . x = d} in the floor plan.
struct Plane {
  Vec2 normal;
  double d = 0.0;
  bool observed = true;
  double end_azimuth = 0.0;    // azimuth just past the wall's last column
  double start_azimuth = 0.0;  // azimuth just before its first column
};

Vec2 unit(double azimuth) { return {std::cos(azimuth), std::sin(azimuth)}; }

bool parallel(const Plane& a, const Plane& b, double tolerance) {
  return std::abs(cross2(a.normal, b.normal)) < tolerance;
}

// Consecutive observations of one plane (spurious corner splits) collapse
// into the first one, with the distance averaged.
std::vector<Plane> merge_coplanar(std::vector<Plane> planes, double tolerance,
                                  std::vector<std::string>* warnings) {
  bool changed = true;
  while (changed && planes.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < planes.size(); ++i) {
      const std::size_t j = (i + 1) % planes.size();
      Plane& a = planes[i];
      const Plane& b = planes[j];
      if (a.normal.dot(b.normal) > 0.0 && parallel(a, b, 0.035) &&
          std::abs(a.d - b.d) <= tolerance * std::max(a.d, b.d)) {
        a.normal = (a.normal + b.normal).normalized();
        a.d = 0.5 * (a.d + b.d);
        a.end_azimuth = b.end_azimuth;
        warnings->push_back("merged coplanar walls " + std::to_string(i) +
                            " and " + std::to_string(j));
        planes.erase(planes.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
  }
  return planes;
}

// Range along the central ray of `azimuth` to the plane, or +inf if the ray
// moves away from it.
double range_to(const Plane& p, double azimuth) {
  const double c = p.normal.dot(unit(azimuth));
  return c > 1e-12 ? p.d / c : std::numeric_limits<double>::infinity();
}

// Between two consecutive parallel Manhattan walls lies a wall that is seen
// edge-on or not at all. It passes through the visible end of the nearer
// wall, perpendicular to both.
std::vector<Plane> insert_hidden(const std::vector<Plane>& planes,
                                 std::vector<std::string>* warnings) {
  std::vector<Plane> out;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const Plane& a = planes[i];
    const Plane& b = planes[(i + 1) % planes.size()];
    out.push_back(a);
    if (!parallel(a, b, 1e-6)) continue;
    const double azimuth = b.start_azimuth;
    const double ra = range_to(a, azimuth);
    const double rb = range_to(b, azimuth);
    if (!std::isfinite(ra) || !std::isfinite(rb)) {
      fail(ErrorCode::kInfeasibleLayout,
           "parallel consecutive walls cannot be joined by a hidden wall");
    }
    const Plane& near = ra < rb ? a : b;
    const Vec2 corner = std::min(ra, rb) * unit(azimuth);
    Plane hidden;
    hidden.normal = perp(near.normal);
    hidden.d = hidden.normal.dot(corner);
    hidden.observed = false;
    hidden.start_azimuth = hidden.end_azimuth = azimuth;
    out.push_back(hidden);
    warnings->push_back("inserted hidden wall after wall " +
                        std::to_string(i));
  }
  return out;
}

double weighted_median(std::vector<std::pair<double, double>> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const auto& v : values) total += v.second;
  double acc = 0.0;
  for (const auto& [value, weight] : values) {
    acc += weight;
    if (acc >= 0.5 * total) return value;
  }
  return values.back().first;
}

// Direction of the wall line through the floor-plan points where the rays
// reach the given heights, oriented so the camera sees the wall's front.
Vec2 fit_direction(const WallRays& rays, double h_c, double h_f) {
  std::vector<Vec2> pts;
  const auto add = [&](const ProjectingRay& r, double h) {
    const Vec3 p = r.origin + (h / r.direction.z()) * r.direction;
    pts.push_back(p.head<2>());
  };
  for (const auto& r : rays.ceiling) add(r, h_c);
  for (const auto& r : rays.floor) add(r, h_f);
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : pts) cov += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Vec2 dir = es.eigenvectors().col(1);
  if (perp(dir).dot(centroid) < 0.0) dir = -dir;
  return dir;
}

}  // namespace

WallRays collect_wall_rays(const BoundaryObservation& obs,
                           const ColumnRange& segment,
                           const SolverOptions& options) {
  const CameraRig& rig = obs.camera;
  int margin = std::max(0, options.segment_margin);
  if (segment.length - 2 * margin < 3) margin = std::max(0, (segment.length - 3) / 2);
  const int usable = segment.length - 2 * margin;
  if (usable < 3) {
    fail(ErrorCode::kSegmentation,
         "wall segment starting at column " + std::to_string(segment.begin) +
             " spans fewer than 3 columns");
  }
  const int count = std::min(usable, std::max(3, options.max_rays_per_line));
  WallRays rays;
  for (int k = 0; k < count; ++k) {
    const int offset =
        count == 1 ? 0
                   : static_cast<int>(std::lround(
                         static_cast<double>(k) * (usable - 1) / (count - 1)));
    const int col = segment.column(margin + offset, rig.width);
    const auto i = static_cast<std::size_t>(col);
    rays.ceiling.push_back(
        back_project(rig, col, rig.row_of_elevation(obs.theta_ceiling[i])));
    rays.floor.push_back(
        back_project(rig, col, rig.row_of_elevation(obs.theta_floor[i])));
  }
  return rays;
}

LayoutSolution reconstruct_layout(const BoundaryObservation& obs, Mode mode,
                                  const SolverOptions& options) {
  obs.validate();
  obs.camera.validate();
  const CameraRig& rig = obs.camera;
  const std::vector<ColumnRange> segments = segment_columns(
      obs, options.corner_threshold, options.min_corner_separation);
  const std::size_t n = segments.size();

  std::vector<WallRays> rays;
  for (const auto& seg : segments) {
    rays.push_back(collect_wall_rays(obs, seg, options));
  }

  // Single-wall solves give the camera-relative heights; short walls are
  // poorly conditioned on their own, so every wall direction is then refit
  // against the pooled heights.
  std::vector<std::string> warnings;
  std::vector<Diagnostics> per_wall(n);
  std::vector<std::pair<double, double>> ceilings;
  std::vector<std::pair<double, double>> floors;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      WallEstimate est = solve_wall_overdetermined(rays[i], options);
      const double weight = segments[i].length;
      ceilings.emplace_back(est.wall.h_c, weight);
      floors.emplace_back(est.wall.h_f, weight);
      per_wall[i] = std::move(est.diagnostics);
    } catch (const Error& e) {
      warnings.push_back("wall " + std::to_string(i) + " solve failed: " +
                         e.what());
    }
  }
  if (ceilings.empty()) {
    fail(ErrorCode::kDegenerate, "no wall could be solved on its own");
  }
  const double h_c = weighted_median(ceilings);
  const double h_f = weighted_median(floors);
  if (!(h_c > 0.0 && h_f < 0.0)) {
    fail(ErrorCode::kInfeasibleLayout,
         "single-wall heights do not bracket the camera");
  }
  std::vector<Vec2> directions(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    directions[i] = fit_direction(rays[i], h_c, h_f);
    weights[i] = segments[i].length;
  }

  LayoutSolution sol;
  if (mode == Mode::kManhattan) {
    const DirectionClasses dc = estimate_direction_classes(directions, weights);
    for (std::size_t i = 0; i < n; ++i) {
      if (dc.ambiguous[i]) {
        warnings.push_back("wall " + std::to_string(i) +
                           " is near the 45 degree class boundary");
      }
    }
    sol = solve_manhattan(rays, dc.classes, options);
  } else {
    sol = solve_atlanta(rays, directions, options);
  }
  for (auto& w : warnings) sol.diagnostics.warnings.push_back(std::move(w));
  warnings.clear();

  std::vector<Plane> planes;
  for (std::size_t i = 0; i < n; ++i) {
    Plane p;
    p.normal = sol.walls[i].frame.normal();
    p.d = sol.walls[i].d;
    p.start_azimuth = rig.azimuth(segments[i].begin - 0.5);
    p.end_azimuth = rig.azimuth(segments[i].begin + segments[i].length - 0.5);
    planes.push_back(p);
  }
  planes = merge_coplanar(std::move(planes), options.merge_tolerance, &warnings);
  if (mode == Mode::kManhattan && options.insert_hidden_walls) {
    planes = insert_hidden(planes, &warnings);
  }
  if (planes.size() < 3) {
    fail(ErrorCode::kInfeasibleLayout, "fewer than 3 walls remain");
  }

  const std::size_t m = planes.size();
  Polygon footprint(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Plane& prev = planes[(k + m - 1) % m];
    const Plane& cur = planes[k];
    if (!intersect_wall_planes(prev.normal, prev.d, cur.normal, cur.d,
                               &footprint[k])) {
      fail(ErrorCode::kInfeasibleLayout,
           "consecutive walls " + std::to_string((k + m - 1) % m) + " and " +
               std::to_string(k) + " are parallel");
    }
  }
  if (!polygon::is_simple(footprint) || polygon::signed_area(footprint) <= 0.0 ||
      !polygon::contains(footprint, Vec2::Zero())) {
    fail(ErrorCode::kInfeasibleLayout,
         "reconstructed floor plan is not a simple polygon around the camera");
  }

  sol.footprint = footprint;
  sol.per_wall = std::move(per_wall);
  const Layout layout = sol.layout();
  sol.walls.clear();
  sol.observed.clear();
  for (std::size_t k = 0; k < m; ++k) {
    sol.walls.push_back(layout.wall(k));
    sol.observed.push_back(planes[k].observed);
  }
  for (auto& w : warnings) sol.diagnostics.warnings.push_back(std::move(w));
  return sol;
}

}  // namespace ncpano
