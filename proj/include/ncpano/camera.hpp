#pragma once

#include <numbers>

#include "ncpano/geometry.hpp"

namespace ncpano {

// Non-central circular panorama. Optical centers lie on a horizontal circle
// of radius `radius` centered at the origin; every image column is a central
// pencil at C(phi) = radius * (cos phi, sin phi, 0) looking radially outward.
// Rows follow an equirectangular elevation mapping.
struct CameraRig {
  double radius = 0.5;
  int width = 1024;
  int height = 512;

  // Throws kInvalidArgument unless radius > 0 and width, height >= 2.
  void validate() const;

  double azimuth(double col) const {
    return 2.0 * std::numbers::pi * col / width;
  }
  double elevation(double row) const {
    return std::numbers::pi * (0.5 - row / height);
  }
  double row_of_elevation(double theta) const {
    return height * (0.5 - theta / std::numbers::pi);
  }
  // Radians per image row.
  double row_step() const { return std::numbers::pi / height; }

  Vec3 center(double azimuth) const;
};

// Projecting ray of pixel (col, row); row may be fractional. Throws
// kOutOfRange for columns outside [0, width) or rows at or beyond the poles.
ProjectingRay back_project(const CameraRig& rig, int col, double row);

// Elevation at which the pencil of column `col` sees a point at horizontal
// range `point_distance` (measured from that column's optical center) and
// height `point_height`.
double project_elevation(const CameraRig& rig, int col, double point_distance,
                         double point_height);

}  // namespace ncpano
