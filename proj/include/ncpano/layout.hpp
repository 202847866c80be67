#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncpano/geometry.hpp"

namespace ncpano {

enum class Mode { kManhattan, kAtlanta };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

using Polygon = std::vector<Vec2>;

// Floor-plan polygon (counter-clockwise, meters, camera frame) extruded
// between the floor and ceiling heights.
struct Layout {
  Polygon vertices;
  double h_c = 1.5;
  double h_f = -1.5;

  std::size_t wall_count() const { return vertices.size(); }
  Vec2 edge_start(std::size_t i) const { return vertices[i]; }
  Vec2 edge_end(std::size_t i) const {
    return vertices[(i + 1) % vertices.size()];
  }

  // Ground-truth wall for edge i. e1 runs against the counter-clockwise edge
  // direction so e2 is the outward normal; d is negative when the camera
  // origin lies on the exterior side of the edge line.
  Wall wall(std::size_t i) const;

  // Footprint and heights scaled about the camera origin.
  Layout scaled(double s) const;
  // Rotation about the vertical axis through the camera origin.
  Layout rotated(double angle) const;
  Layout translated(const Vec2& offset) const;

  // Throws kInvalidArgument on: fewer than 3 vertices, non-finite values,
  // clockwise or self-intersecting footprint, h_c <= 0 or h_f >= 0, camera
  // origin outside, or camera circle (plus clearance) touching a wall.
  void validate(double camera_radius, double clearance = 0.0) const;
};

namespace polygon {

double signed_area(const Polygon& p);
double area(const Polygon& p);
bool is_simple(const Polygon& p);
bool contains(const Polygon& p, const Vec2& q);
double segment_distance(const Vec2& a, const Vec2& b, const Vec2& q);
// Minimum distance from q to the polygon boundary; returns the edge index.
double boundary_distance(const Polygon& p, const Vec2& q,
                         std::size_t* nearest_edge = nullptr);
bool is_convex(const Polygon& p);
// Smallest signed distance from q to the supporting lines of the edges,
// positive on the interior side. Positive iff q is in the polygon's kernel.
double min_interior_line_distance(const Polygon& p, const Vec2& q);

}  // namespace polygon

}  // namespace ncpano
