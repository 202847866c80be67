#include "ncpano/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ncpano/error.hpp"

namespace ncpano {

std::string_view to_string(Mode mode) {
  return mode == Mode::kManhattan ? "manhattan" : "atlanta";
}

Mode parse_mode(std::string_view text) {
  if (text == "manhattan") return Mode::kManhattan;
  if (text == "atlanta") return Mode::kAtlanta;
  fail(ErrorCode::kInvalidArgument,
       "unknown mode '" + std::string(text) + "' (manhattan|atlanta)");
}

Wall Layout::wall(std::size_t i) const {
  const Vec2 a = edge_start(i);
  const Vec2 b = edge_end(i);
  Wall w;
  w.frame = WallFrame::from_direction(a - b);
  w.d = w.frame.normal().dot(a);
  w.h_c = h_c;
  w.h_f = h_f;
  return w;
}

Layout Layout::scaled(double s) const {
  Layout out = *this;
  for (auto& v : out.vertices) v *= s;
  out.h_c *= s;
  out.h_f *= s;
  return out;
}

Layout Layout::rotated(double angle) const {
  const Eigen::Rotation2Dd rot(angle);
  Layout out = *this;
  for (auto& v : out.vertices) v = rot * v;
  return out;
}

Layout Layout::translated(const Vec2& offset) const {
  Layout out = *this;
  for (auto& v : out.vertices) v += offset;
  return out;
}

void Layout::validate(double camera_radius, double clearance) const {
  const auto bad = [](const std::string& what) {
    fail(ErrorCode::kInvalidArgument, "invalid layout: " + what);
  };
  if (vertices.size() < 3) bad("needs at least 3 vertices");
  for (const auto& v : vertices) {
    if (!v.allFinite()) bad("non-finite vertex");
  }
  if (!std::isfinite(h_c) || !std::isfinite(h_f)) bad("non-finite height");
  if (!(h_c > 0.0)) bad("ceiling height must be above the camera plane");
  if (!(h_f < 0.0)) bad("floor height must be below the camera plane");
  if (!polygon::is_simple(vertices)) bad("footprint is not a simple polygon");
  if (polygon::signed_area(vertices) <= 0.0) {
    bad("footprint must be counter-clockwise");
  }
  const Vec2 origin = Vec2::Zero();
  if (!polygon::contains(vertices, origin)) {
    bad("camera origin is outside the footprint");
  }
  std::size_t edge = 0;
  const double dist = polygon::boundary_distance(vertices, origin, &edge);
  if (dist <= camera_radius + clearance) {
    bad("camera circle (radius " + std::to_string(camera_radius) +
        " + clearance " + std::to_string(clearance) + ") reaches wall " +
        std::to_string(edge) + " at distance " + std::to_string(dist));
  }
}

namespace polygon {

double signed_area(const Polygon& p) {
  double twice = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    twice += cross2(p[i], p[(i + 1) % p.size()]);
  }
  return 0.5 * twice;
}

double area(const Polygon& p) { return std::abs(signed_area(p)); }

namespace {

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-12 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& q) {
  return q.x() <= std::max(a.x(), b.x()) + 1e-12 &&
         q.x() >= std::min(a.x(), b.x()) - 1e-12 &&
         q.y() <= std::max(a.y(), b.y()) + 1e-12 &&
         q.y() >= std::min(a.y(), b.y()) - 1e-12;
}

bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                    const Vec2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool is_simple(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((p[(i + 1) % n] - p[i]).norm() == 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a1 = p[i];
    const Vec2& a2 = p[(i + 1) % n];
    // Adjacent edges may only share their common vertex: reject fold-backs.
    const Vec2& a0 = p[(i + n - 1) % n];
    if (orientation(a0, a1, a2) == 0 && (a0 - a1).dot(a2 - a1) > 0) {
      return false;
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a1, a2, p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool contains(const Polygon& p, const Vec2& q) {
  bool inside = false;
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
    const Vec2& a = p[i];
    const Vec2& b = p[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& q) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - q).norm();
}

double boundary_distance(const Polygon& p, const Vec2& q,
                         std::size_t* nearest_edge) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = segment_distance(p[i], p[(i + 1) % p.size()], q);
    if (d < best) {
      best = d;
      if (nearest_edge != nullptr) *nearest_edge = i;
    }
  }
  return best;
}

bool is_convex(const Polygon& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross2(p[(i + 1) % n] - p[i], p[(i + 2) % n] - p[(i + 1) % n]) < 0) {
      return false;
    }
  }
  return true;
}

double min_interior_line_distance(const Polygon& p, const Vec2& q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 t = (p[(i + 1) % p.size()] - p[i]).normalized();
    best = std::min(best, cross2(t, q - p[i]));
  }
  return best;
}

}  // namespace polygon

}  // namespace ncpano
