#include "ncpano/camera.hpp"

#include <cmath>
#include <string>

#include "ncpano/error.hpp"

namespace ncpano {

void CameraRig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorCode::kInvalidArgument,
         "camera radius must be positive, got " + std::to_string(radius));
  }
  if (width < 2 || height < 2) {
    fail(ErrorCode::kInvalidArgument,
         "camera image must be at least 2x2, got " + std::to_string(width) +
             "x" + std::to_string(height));
  }
}

Vec3 CameraRig::center(double azimuth) const {
  return {radius * std::cos(azimuth), radius * std::sin(azimuth), 0.0};
}

ProjectingRay back_project(const CameraRig& rig, int col, double row) {
  if (col < 0 || col >= rig.width) {
    fail(ErrorCode::kOutOfRange, "column " + std::to_string(col) +
                                     " outside [0, " +
                                     std::to_string(rig.width) + ")");
  }
  if (!(row > 0.0 && row < rig.height)) {
    fail(ErrorCode::kOutOfRange,
         "row " + std::to_string(row) + " maps to a pole or beyond");
  }
  const double phi = rig.azimuth(col);
  const double theta = rig.elevation(row);
  const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
  const Vec3 direction = std::cos(theta) * radial + std::sin(theta) * Vec3::UnitZ();
  return ProjectingRay::from_origin(rig.radius * radial, direction);
}

double project_elevation(const CameraRig& /*rig*/, int /*col*/,
                         double point_distance, double point_height) {
  if (!(point_distance > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "point distance must be positive");
  }
  return std::atan2(point_height, point_distance);
}

}  // namespace ncpano
