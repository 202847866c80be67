#pragma once

#include <vector>

#include "ncpano/layout.hpp"

namespace ncpano {

// Area of the intersection of two simple polygons (either orientation,
// convex or not).
double polygon_intersection_area(const Polygon& p, const Polygon& q);

// Volume IoU of the two extruded layouts, compared in place. Throws kMetric
// for a zero-volume layout.
double iou3d(const Layout& pred, const Layout& gt);

struct ScaledIou {
  double iou = 0.0;
  double scale = 1.0;  // applied to pred about the camera origin
};

// Best IoU of s * pred against gt for s in [min_scale, max_scale]. Never
// lower than the unscaled IoU.
ScaledIou iou3d_u2s(const Layout& pred, const Layout& gt,
                    double min_scale = 0.1, double max_scale = 10.0);

struct CornerError {
  double ce = 0.0;   // mean 3D corner distance, meters
  double cen = 0.0;  // ce over the ground-truth bounding-box diagonal
  std::size_t shift = 0;  // pred corner matched to gt corner 0
  // Per 3D corner: ceiling corners first, then floor corners, in gt order.
  std::vector<double> distances;
};

// Matches corners by the best cyclic shift. Throws kMetric when the corner
// counts differ.
CornerError corner_error(const Layout& pred, const Layout& gt);

// 3D bounding-box diagonal of the extruded layout.
double layout_diagonal(const Layout& layout);

struct EvaluationReport {
  double iou3d = 0.0;
  double iou3d_u2s = 0.0;
  double ce_meters = 0.0;
  double cen = 0.0;
  double scale_star = 1.0;
  std::vector<double> corner_distances;
};

EvaluationReport evaluate(const Layout& pred, const Layout& gt);

}  // namespace ncpano
