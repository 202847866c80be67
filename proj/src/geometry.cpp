#include "ncpano/geometry.hpp"

#include <cmath>

namespace ncpano {

PluckerLine PluckerLine::through(const Vec3& point, const Vec3& direction) {
  return {direction, point.cross(direction)};
}

double PluckerLine::constraint_residual() const {
  return std::abs(direction.dot(moment)) / direction.norm();
}

ProjectingRay ProjectingRay::from_origin(const Vec3& origin,
                                         const Vec3& direction) {
  return {direction, origin.cross(direction), origin};
}

ProjectingRay ProjectingRay::scaled(double s) const {
  return {s * direction, s * moment, origin};
}

ProjectingRay ProjectingRay::elevation_derivative() const {
  const double norm = direction.norm();
  const Vec3 unit = direction / norm;
  const double s = unit.z();
  const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
  if (c == 0.0) return {Vec3::Zero(), Vec3::Zero(), origin};
  const Vec3 d = norm * (Vec3::UnitZ() - s * unit) / c;
  return {d, origin.cross(d), origin};
}

double side(const ProjectingRay& ray, const PluckerLine& line) {
  return ray.direction.dot(line.moment) + ray.moment.dot(line.direction);
}

double side(const PluckerLine& a, const PluckerLine& b) {
  return a.direction.dot(b.moment) + a.moment.dot(b.direction);
}

WallFrame WallFrame::from_direction(const Vec2& u) {
  const Vec2 n = u.normalized();
  WallFrame f;
  f.e1 = Vec3(n.x(), n.y(), 0.0);
  f.e3 = Vec3::UnitZ();
  f.e2 = f.e3.cross(f.e1);
  return f;
}

Mat3 WallFrame::world_to_wall() const {
  Mat3 r;
  r.row(0) = e1.transpose();
  r.row(1) = e2.transpose();
  r.row(2) = e3.transpose();
  return r;
}

PluckerLine line_from_wall_params(const WallFrame& frame, double h, double d) {
  const Vec3 closest = d * frame.e2 + h * frame.e3;
  return {frame.e1, closest.cross(frame.e1)};
}

PluckerLine Wall::ceiling_line() const {
  return line_from_wall_params(frame, h_c, d);
}

PluckerLine Wall::floor_line() const {
  return line_from_wall_params(frame, h_f, d);
}

ProjectingRay ray_to_wall_frame(const ProjectingRay& ray,
                                const WallFrame& frame) {
  const Mat3 r = frame.world_to_wall();
  return {r * ray.direction, r * ray.moment, r * ray.origin};
}

PluckerLine line_to_wall_frame(const PluckerLine& line,
                               const WallFrame& frame) {
  const Mat3 r = frame.world_to_wall();
  return {r * line.direction, r * line.moment};
}

bool intersect_wall_planes(const Vec2& n1, double d1, const Vec2& n2,
                           double d2, Vec2* out) {
  const double det = cross2(n1, n2);
  if (std::abs(det) < 1e-12 * n1.norm() * n2.norm()) return false;
  // Cramer's rule on [n1; n2] p = [d1; d2].
  *out = Vec2((d1 * n2.y() - d2 * n1.y()) / det,
              (n1.x() * d2 - n2.x() * d1) / det);
  return true;
}

}  // namespace ncpano
