#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ncpano {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Counter-clockwise quarter turn: (x, y) -> (-y, x).
inline Vec2 perp(const Vec2& a) { return {-a.y(), a.x()}; }

// A 3D line in Plücker coordinates. The direction need not be unit length;
// direction . moment == 0 for a proper line.
struct PluckerLine {
  Vec3 direction = Vec3::UnitX();
  Vec3 moment = Vec3::Zero();

  static PluckerLine through(const Vec3& point, const Vec3& direction);

  // Distance between the direction/moment pair and the Plücker quadric,
  // normalized by |direction|.
  double constraint_residual() const;
};

// An oriented projecting ray. Keeps the optical center that generated it so
// the ray can be re-expressed in other frames and differentiated along its
// image column.
struct ProjectingRay {
  Vec3 direction = Vec3::UnitX();
  Vec3 moment = Vec3::Zero();
  Vec3 origin = Vec3::Zero();

  static ProjectingRay from_origin(const Vec3& origin, const Vec3& direction);

  // Multiplies the Plücker 6-vector by s. The origin is unchanged.
  ProjectingRay scaled(double s) const;

  PluckerLine line() const { return {direction, moment}; }

  // d(ray)/d(elevation) for a rotation of the direction inside its vertical
  // plane, scaled like the ray itself. Used for noise-compensated solves.
  ProjectingRay elevation_derivative() const;
};

// Bilinear side operator: zero iff the two lines are coplanar.
double side(const ProjectingRay& ray, const PluckerLine& line);
double side(const PluckerLine& a, const PluckerLine& b);

// Orthonormal frame attached to a vertical wall: e1 along the wall, e2 the
// horizontal normal (e2 = e3 x e1), e3 = +z.
struct WallFrame {
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 e3 = Vec3::UnitZ();

  // Builds the frame from a horizontal wall direction; u is normalized.
  static WallFrame from_direction(const Vec2& u);

  Vec2 direction() const { return e1.head<2>(); }
  Vec2 normal() const { return e2.head<2>(); }

  // Rows e1, e2, e3: maps world coordinates into the wall frame.
  Mat3 world_to_wall() const;
};

// The ceiling/floor pair of a vertical wall. The wall plane is
// {x : e2 . x = d}; heights are signed relative to the camera plane.
struct Wall {
  WallFrame frame;
  double d = 1.0;
  double h_c = 1.0;
  double h_f = -1.0;

  PluckerLine ceiling_line() const;
  PluckerLine floor_line() const;

  bool is_valid() const { return d > 0.0 && h_c > h_f; }
};

// direction = e1, moment = (d e2 + h e3) x e1 = h e2 - d e3.
PluckerLine line_from_wall_params(const WallFrame& frame, double h, double d);

// Rotates direction, moment and origin into the wall frame.
ProjectingRay ray_to_wall_frame(const ProjectingRay& ray,
                                const WallFrame& frame);
PluckerLine line_to_wall_frame(const PluckerLine& line,
                               const WallFrame& frame);

// Intersection of two non-parallel vertical wall planes, as a floor-plan
// point. Returns false when the planes are (nearly) parallel.
bool intersect_wall_planes(const Vec2& n1, double d1, const Vec2& n2,
                           double d2, Vec2* out);

}  // namespace ncpano
