#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ncpano/error.hpp"
#include "solver_internal.hpp"

namespace ncpano {

namespace {

void check_rays(const std::vector<WallRays>& walls, std::size_t min_per_line) {
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (walls[i].ceiling.size() < min_per_line ||
        walls[i].floor.size() < min_per_line) {
      fail(ErrorCode::kInvalidArgument,
           "wall " + std::to_string(i) + " needs at least " +
               std::to_string(min_per_line) + " ceiling and floor rays");
    }
  }
}

Eigen::VectorXd manhattan_row(const ProjectingRay& ray, bool ceiling,
                              bool rotated, std::size_t wall, Eigen::Index cols) {
  auto c = detail::side_coefficients(ray);
  if (rotated) c = detail::rotate_quarter(c);
  Eigen::VectorXd row = Eigen::VectorXd::Zero(cols);
  row.segment<2>(0) = c.u_coef;
  row.segment<2>(ceiling ? 2 : 4) = c.h_coef;
  row(6 + static_cast<Eigen::Index>(wall)) = c.d_coef;
  return row;
}

// Rows of the Atlanta system in the wall frame, where the wall direction is
// (1, 0): moment_x + h direction_y - d direction_z.
Eigen::VectorXd atlanta_row(const ProjectingRay& local, bool ceiling,
                            std::size_t wall, Eigen::Index cols) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(cols);
  row(0) = local.moment.x();
  row(ceiling ? 1 : 2) = local.direction.y();
  row(3 + static_cast<Eigen::Index>(wall)) = -local.direction.z();
  return row;
}

}  // namespace

LayoutSolution solve_manhattan(const std::vector<WallRays>& walls,
                               const std::vector<int>& direction_class,
                               const SolverOptions& options) {
  const std::size_t n = walls.size();
  if (n < 4) {
    fail(ErrorCode::kInvalidArgument, "Manhattan solve needs at least 4 walls");
  }
  if (direction_class.size() != n) {
    fail(ErrorCode::kInvalidArgument,
         "one direction class per wall is required");
  }
  check_rays(walls, 3);
  const Eigen::Index cols = 6 + static_cast<Eigen::Index>(n);
  detail::RaySystem sys(static_cast<int>(cols));
  for (std::size_t i = 0; i < n; ++i) {
    const bool rotated = direction_class[i] != 0;
    for (const auto& r : walls[i].ceiling) {
      sys.add(manhattan_row(r, true, rotated, i, cols),
              manhattan_row(r.elevation_derivative(), true, rotated, i, cols));
    }
    for (const auto& r : walls[i].floor) {
      sys.add(manhattan_row(r, false, rotated, i, cols),
              manhattan_row(r.elevation_derivative(), false, rotated, i, cols));
    }
  }
  const Eigen::MatrixXd a = sys.normalized();
  const Eigen::MatrixXd da = sys.normalized_derivative();
  const NullSpaceParam nsp = null_space(a, da, 2, options.method);
  if (detail::sigma_ratio(nsp.singular_values, 3) <
      options.degenerate_tolerance) {
    fail(ErrorCode::kDegenerate,
         "Manhattan system has more than two null directions");
  }

  LayoutSolution out;
  out.mode = Mode::kManhattan;
  Diagnostics& diag = out.diagnostics;
  diag.singular_values = nsp.singular_values;
  diag.null_dimension =
      detail::count_null(nsp.singular_values, options.rank_tolerance);
  const detail::ParallelSolution par =
      detail::enforce_parallelism(a, da, nsp, options, &diag.warnings);
  diag.lambda = par.lambda;
  diag.lambda_fallback = par.fallback;

  const Eigen::VectorXd& x = par.vector;
  const double norm_u = x.segment<2>(0).norm();
  if (!(norm_u > 1e-12 * x.norm())) {
    fail(ErrorCode::kInfeasibleLayout, "Manhattan direction vanishes");
  }
  const Vec2 u = x.segment<2>(0) / norm_u;
  const double d_scale = x.segment(6, static_cast<Eigen::Index>(n))
                             .cwiseAbs()
                             .maxCoeff() /
                         norm_u;
  out.h_c = par.h_c;
  out.h_f = par.h_f;
  out.manhattan_direction = u;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 dir = direction_class[i] != 0 ? perp(u) : u;
    double d = x(6 + static_cast<Eigen::Index>(i)) / norm_u;
    // Each wall's own sign fixes which way its direction points.
    if (d < 0.0) {
      dir = -dir;
      d = -d;
    }
    if (!(d > 1e-9 * d_scale)) {
      fail(ErrorCode::kInfeasibleLayout,
           "wall " + std::to_string(i) + " has non-positive distance");
    }
    out.walls.push_back({WallFrame::from_direction(dir), d, out.h_c, out.h_f});
  }
  out.observed.assign(n, true);
  detail::fill_residuals(walls, out.walls, &diag);
  return out;
}

LayoutSolution solve_atlanta(const std::vector<WallRays>& walls,
                             const std::vector<Vec2>& directions,
                             const SolverOptions& options) {
  const std::size_t n = walls.size();
  if (n < 3) {
    fail(ErrorCode::kInvalidArgument, "Atlanta solve needs at least 3 walls");
  }
  if (directions.size() != n) {
    fail(ErrorCode::kInvalidArgument, "one direction per wall is required");
  }
  check_rays(walls, 2);
  const Eigen::Index cols = 3 + static_cast<Eigen::Index>(n);
  detail::RaySystem sys(static_cast<int>(cols));
  std::vector<WallFrame> frames;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(directions[i].norm() > 0.0) || !directions[i].allFinite()) {
      fail(ErrorCode::kInvalidArgument,
           "wall " + std::to_string(i) + " has no valid direction");
    }
    frames.push_back(WallFrame::from_direction(directions[i]));
    const auto add = [&](const ProjectingRay& r, bool ceiling) {
      const ProjectingRay local = ray_to_wall_frame(r, frames[i]);
      sys.add(atlanta_row(local, ceiling, i, cols),
              atlanta_row(local.elevation_derivative(), ceiling, i, cols));
    };
    for (const auto& r : walls[i].ceiling) add(r, true);
    for (const auto& r : walls[i].floor) add(r, false);
  }
  const Eigen::MatrixXd a = sys.normalized();
  const Eigen::MatrixXd da = sys.normalized_derivative();
  const NullSpaceParam nsp = null_space(a, da, 1, options.method);
  if (detail::sigma_ratio(nsp.singular_values, 2) <
      options.degenerate_tolerance) {
    fail(ErrorCode::kDegenerate,
         "Atlanta system has more than one null direction");
  }
  const Eigen::VectorXd& h = nsp.basis[0];
  if (std::abs(h(0)) < options.pin_tolerance) {
    fail(ErrorCode::kDegenerate,
         "Atlanta null vector has a vanishing first component");
  }

  Eigen::VectorXd x;
  if (options.method == NullSpaceMethod::kNoiseCompensated) {
    x = h / h(0);
  } else {
    // Pin the first unknown to 1 and solve the rest in least squares.
    const Eigen::MatrixXd rest = a.rightCols(cols - 1);
    const Eigen::VectorXd rhs = -a.col(0);
    x.resize(cols);
    x(0) = 1.0;
    x.tail(cols - 1) = rest.colPivHouseholderQr().solve(rhs);
  }

  LayoutSolution out;
  out.mode = Mode::kAtlanta;
  out.h_c = x(1);
  out.h_f = x(2);
  Diagnostics& diag = out.diagnostics;
  diag.singular_values = nsp.singular_values;
  diag.null_dimension =
      detail::count_null(nsp.singular_values, options.rank_tolerance);
  if (!(out.h_c > out.h_f)) {
    fail(ErrorCode::kInfeasibleLayout,
         "Atlanta solution places the ceiling below the floor");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x(3 + static_cast<Eigen::Index>(i));
    if (!(d > 0.0)) {
      fail(ErrorCode::kInfeasibleLayout,
           "wall " + std::to_string(i) + " has non-positive distance");
    }
    out.walls.push_back({frames[i], d, out.h_c, out.h_f});
  }
  out.observed.assign(n, true);
  detail::fill_residuals(walls, out.walls, &diag);
  return out;
}

DirectionClasses estimate_direction_classes(const std::vector<Vec2>& directions,
                                            const std::vector<double>& weights) {
  const std::size_t n = directions.size();
  if (n < 2) {
    fail(ErrorCode::kInvalidArgument,
         "direction classes need at least 2 walls");
  }
  if (!weights.empty() && weights.size() != n) {
    fail(ErrorCode::kInvalidArgument, "one weight per wall is required");
  }
  const auto weight = [&](std::size_t i) {
    return weights.empty() ? 1.0 : weights[i];
  };
  // Quadrupled angles identify all four orientations of a Manhattan frame.
  double s = 0.0;
  double c = 0.0;
  std::size_t heaviest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::atan2(directions[i].y(), directions[i].x());
    s += weight(i) * std::sin(4.0 * a);
    c += weight(i) * std::cos(4.0 * a);
    if (weight(i) > weight(heaviest)) heaviest = i;
  }
  const Vec2 ref = directions[heaviest].normalized();
  const double mean = std::hypot(s, c) > 1e-12
                          ? std::atan2(s, c) / 4.0
                          : std::atan2(ref.y(), ref.x());
  Vec2 u(std::cos(mean), std::sin(mean));
  // Of the four equivalent axes, report the one closest to the dominant wall.
  for (const Vec2& cand : {perp(u), Vec2(-u), Vec2(-perp(u))}) {
    if (cand.dot(ref) > u.dot(ref)) u = cand;
  }

  DirectionClasses out;
  out.u = u;
  for (const Vec2& dir : directions) {
    const Vec2 d = dir.normalized();
    const double along = std::abs(d.dot(u));
    const double across = std::abs(d.dot(perp(u)));
    out.classes.push_back(along >= across ? 0 : 1);
    const double angle = std::atan2(across, along);  // in [0, pi/2]
    out.ambiguous.push_back(std::abs(angle - std::numbers::pi / 4.0) <
                            5.0 * std::numbers::pi / 180.0);
  }
  return out;
}

}  // namespace ncpano
