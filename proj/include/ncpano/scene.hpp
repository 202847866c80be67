#pragma once

#include <cstdint>
#include <vector>

#include "ncpano/camera.hpp"
#include "ncpano/layout.hpp"

namespace ncpano {

struct VisibleHit {
  std::size_t wall = 0;
  double t = 0.0;  // range along the horizontal ray, meters
};

// Nearest wall hit by the horizontal ray origin + t (cos a, sin a), t > 0.
// Throws kInternal when nothing is hit (origin not inside the footprint).
VisibleHit visible_wall(const Layout& layout, const Vec2& origin,
                        double azimuth);

// Per-column boundary signal: the elevations of the ceiling and floor
// boundaries and a wall-wall corner probability.
struct BoundaryObservation {
  CameraRig camera;
  std::vector<double> theta_ceiling;
  std::vector<double> theta_floor;
  std::vector<double> corner_prob;

  // Throws kInvalidArgument on length mismatches or boundary elevations on
  // the wrong side of the horizon.
  void validate() const;
};

struct RenderResult {
  BoundaryObservation observation;
  std::vector<std::size_t> wall_of_column;  // ground-truth visibility labels
};

RenderResult render_with_labels(const Layout& layout, const CameraRig& rig);
BoundaryObservation render_boundaries(const Layout& layout,
                                      const CameraRig& rig);

struct NoiseOptions {
  double sigma_px = 0.0;
  std::uint64_t seed = 0;
  // Triangular corner blur of half-width 2 columns.
  bool blur_corners = false;
};

// Adds i.i.d. Gaussian elevation noise (sigma in rows, converted to radians
// through the row mapping). Deterministic for a fixed seed.
BoundaryObservation add_noise(const BoundaryObservation& obs,
                              const NoiseOptions& options);
BoundaryObservation add_noise(const BoundaryObservation& obs, double sigma_px,
                              std::uint64_t seed);

// A run of columns [begin, begin + length) modulo the image width.
struct ColumnRange {
  int begin = 0;
  int length = 0;

  int column(int k, int width) const { return (begin + k) % width; }
  bool contains(int col, int width) const {
    return ((col - begin) % width + width) % width < length;
  }
};

// Splits the circular column domain at corner peaks (prob > threshold,
// non-maximum suppressed within min_separation columns). Throws
// kSegmentation with fewer than 3 corners.
std::vector<ColumnRange> segment_columns(const BoundaryObservation& obs,
                                         double threshold, int min_separation);

}  // namespace ncpano
