#pragma once

// Independent oracles and scene builders shared by the tests. Nothing here
// calls into the code under test except for plain data types and
// back_project, whose own mapping is checked against closed forms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "ncpano/camera.hpp"
#include "ncpano/geometry.hpp"
#include "ncpano/layout.hpp"
#include "ncpano/scene.hpp"
#include "ncpano/solvers.hpp"

namespace ncpano::testing {

constexpr double kPi = std::numbers::pi;

// Distance of closest approach between the lines o + s r and p + t l,
// found by solving the 2x2 normal equations of |o + s r - p - t l|^2.
inline double closest_approach(const Vec3& o, const Vec3& r, const Vec3& p,
                               const Vec3& l) {
  const double a = r.dot(r);
  const double b = r.dot(l);
  const double c = l.dot(l);
  const Vec3 w = o - p;
  const double det = a * c - b * b;
  if (std::abs(det) < 1e-14 * a * c) {
    // Parallel lines: distance from o to the other line.
    const Vec3 q = w - (w.dot(l) / c) * l;
    return q.norm();
  }
  const double s = (b * l.dot(w) - c * r.dot(w)) / det;
  const double t = (a * l.dot(w) - b * r.dot(w)) / det;
  return (o + s * r - p - t * l).norm();
}

// Brute-force 2D ray/segment intersection over all edges (Cramer's rule on
// origin + t dir = a + s (b - a)).
struct BruteHit {
  std::size_t edge = 0;
  double t = std::numeric_limits<double>::infinity();
};

inline BruteHit brute_force_hit(const Polygon& poly, const Vec2& origin,
                                double azimuth) {
  const Vec2 dir(std::cos(azimuth), std::sin(azimuth));
  BruteHit best;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 e = poly[(i + 1) % poly.size()] - a;
    // [dir, -e] (t, s)^T = a - origin
    const double det = dir.x() * (-e.y()) - dir.y() * (-e.x());
    if (std::abs(det) < 1e-15) continue;
    const Vec2 rhs = a - origin;
    const double t = (rhs.x() * (-e.y()) - rhs.y() * (-e.x())) / det;
    const double s = (dir.x() * rhs.y() - dir.y() * rhs.x()) / det;
    if (t > 1e-12 && s >= -1e-12 && s <= 1.0 + 1e-12 && t < best.t) {
      best = {i, t};
    }
  }
  return best;
}

inline Layout square_room(double half, double h_c, double h_f) {
  return {{{-half, -half}, {half, -half}, {half, half}, {-half, half}}, h_c, h_f};
}

inline Layout rectangle_room(double x0, double y0, double x1, double y1,
                             double h_c, double h_f) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, h_c, h_f};
}

// L-shaped 6-wall room; the notch occludes parts of two walls from the
// camera circle while every wall stays at least partly visible.
inline Layout l_shaped_room(double h_c = 1.5, double h_f = -1.4) {
  return {{{-2.0, -2.0}, {3.0, -2.0}, {3.0, 1.0}, {1.0, 1.0}, {1.0, 3.0},
           {-2.0, 3.0}},
          h_c,
          h_f};
}

// Regular polygon with the given apothem, first edge facing -y.
inline Layout regular_room(int n, double apothem, double h_c, double h_f,
                           double phase = 0.0) {
  const double circ = apothem / std::cos(kPi / n);
  Layout l;
  l.h_c = h_c;
  l.h_f = h_f;
  for (int k = 0; k < n; ++k) {
    const double a = phase - kPi / 2.0 - kPi / n + 2.0 * kPi * k / n;
    l.vertices.emplace_back(circ * std::cos(a), circ * std::sin(a));
  }
  return l;
}

// Forward model for one wall, independent of the scene renderer: the
// horizontal ray of column `col` meets the wall plane e2 . x = d at range t
// from its optical center; the boundary is seen at atan2(h, t).
inline std::optional<ProjectingRay> wall_ray(const CameraRig& rig, int col,
                                             const Wall& wall, bool ceiling) {
  const double phi = 2.0 * kPi * col / rig.width;
  const Vec3 c = rig.radius * Vec3(std::cos(phi), std::sin(phi), 0.0);
  const Vec3 r(std::cos(phi), std::sin(phi), 0.0);
  const double denom = wall.frame.e2.dot(r);
  if (denom <= 1e-9) return std::nullopt;
  const double t = (wall.d - wall.frame.e2.dot(c)) / denom;
  if (t <= 0.0) return std::nullopt;
  const double theta = std::atan2(ceiling ? wall.h_c : wall.h_f, t);
  const double row = rig.height * (0.5 - theta / kPi);
  return back_project(rig, col, row);
}

// Columns from which the wall is seen frontally (cosine of incidence above
// `min_cos`).
inline std::vector<int> facing_columns(const CameraRig& rig, const Wall& wall,
                                       double min_cos = 0.3) {
  std::vector<int> cols;
  for (int col = 0; col < rig.width; ++col) {
    const double phi = 2.0 * kPi * col / rig.width;
    const Vec3 r(std::cos(phi), std::sin(phi), 0.0);
    if (wall.frame.e2.dot(r) > min_cos) cols.push_back(col);
  }
  return cols;
}

inline WallRays render_wall(const CameraRig& rig, const Wall& wall,
                            const std::vector<int>& ceiling_cols,
                            const std::vector<int>& floor_cols) {
  WallRays rays;
  for (int c : ceiling_cols) rays.ceiling.push_back(*wall_ray(rig, c, wall, true));
  for (int c : floor_cols) rays.floor.push_back(*wall_ray(rig, c, wall, false));
  return rays;
}

inline Wall make_wall(double angle, double d, double h_c, double h_f) {
  Wall w;
  w.frame = WallFrame::from_direction(Vec2(std::cos(angle), std::sin(angle)));
  w.d = d;
  w.h_c = h_c;
  w.h_f = h_f;
  return w;
}

inline Wall random_wall(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> dist(1.0, 4.0);
  std::uniform_real_distribution<double> hc(0.8, 1.6);
  std::uniform_real_distribution<double> hf(-1.7, -1.1);
  return make_wall(ang(rng), dist(rng), hc(rng), hf(rng));
}

// Largest parameter difference between two walls (direction, d, heights).
inline double wall_distance(const Wall& a, const Wall& b) {
  return std::max({(a.frame.e1 - b.frame.e1).norm(), std::abs(a.d - b.d),
                   std::abs(a.h_c - b.h_c), std::abs(a.h_f - b.h_f)});
}

// Evenly spaced columns from the facing set.
inline std::vector<int> spread(const std::vector<int>& cols, int count) {
  std::vector<int> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(cols[(2 * k + 1) * cols.size() / (2 * count)]);
  }
  return out;
}

inline WallRays wall_rays(const CameraRig& rig, const Wall& wall,
                          int per_line) {
  const auto cols = spread(facing_columns(rig, wall), per_line);
  return render_wall(rig, wall, cols, cols);
}

// Rays of every wall taken from the columns where the renderer sees it.
inline std::vector<WallRays> labelled_rays(const Layout& room,
                                           const CameraRig& rig,
                                           int per_line = 16) {
  const auto r = render_with_labels(room, rig);
  std::vector<std::vector<int>> cols(room.wall_count());
  for (int c = 0; c < rig.width; ++c) cols[r.wall_of_column[c]].push_back(c);
  std::vector<WallRays> out;
  for (std::size_t i = 0; i < room.wall_count(); ++i) {
    std::vector<int> inner(cols[i].begin() + 2, cols[i].end() - 2);
    const int n = std::min<int>(per_line, inner.size());
    out.push_back(
        render_wall(rig, room.wall(i), spread(inner, n), spread(inner, n)));
  }
  return out;
}

inline std::vector<int> classes_from_truth(const Layout& room) {
  const Vec2 ref = room.wall(0).frame.direction();
  std::vector<int> classes;
  for (std::size_t i = 0; i < room.wall_count(); ++i) {
    const double along = std::abs(room.wall(i).frame.direction().dot(ref));
    classes.push_back(along > 0.5 ? 0 : 1);
  }
  return classes;
}

inline std::vector<Vec2> directions_from_truth(const Layout& room) {
  std::vector<Vec2> dirs;
  for (std::size_t i = 0; i < room.wall_count(); ++i) {
    dirs.push_back(room.wall(i).frame.direction());
  }
  return dirs;
}

}  // namespace ncpano::testing
