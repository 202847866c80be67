#include "ncpano/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ncpano/error.hpp"

namespace ncpano {

namespace {

using Triangle = std::array<Vec2, 3>;

double tri_signed_area(const Triangle& t) {
  return 0.5 * cross2(t[1] - t[0], t[2] - t[0]);
}

// Sutherland-Hodgman clip of a convex polygon by a counter-clockwise
// triangle.
double clipped_area(const Triangle& subject, const Triangle& clip) {
  std::vector<Vec2> poly(subject.begin(), subject.end());
  std::vector<Vec2> next;
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 edge = clip[(e + 1) % 3] - a;
    const auto inside = [&](const Vec2& p) { return cross2(edge, p - a); };
    next.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& p = poly[i];
      const Vec2& q = poly[(i + 1) % poly.size()];
      const double sp = inside(p);
      const double sq = inside(q);
      if (sp >= 0.0) next.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        next.push_back(p + (sp / (sp - sq)) * (q - p));
      }
    }
    poly.swap(next);
  }
  if (poly.size() < 3) return 0.0;
  return std::abs(polygon::signed_area(poly));
}

// Fan triangles from the first vertex with their orientation signs.
std::vector<std::pair<Triangle, double>> fan(const Polygon& p) {
  std::vector<std::pair<Triangle, double>> out;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    Triangle t{p[0], p[i], p[i + 1]};
    const double a = tri_signed_area(t);
    if (a == 0.0) continue;
    if (a < 0.0) std::swap(t[1], t[2]);
    out.emplace_back(t, a > 0.0 ? 1.0 : -1.0);
  }
  return out;
}

double volume(const Layout& l) {
  return polygon::area(l.vertices) * (l.h_c - l.h_f);
}

void check_layout(const Layout& l, const char* which) {
  if (l.vertices.size() < 3) {
    fail(ErrorCode::kMetric,
         std::string(which) + " layout has fewer than 3 corners");
  }
  if (!(volume(l) > 0.0) || !std::isfinite(volume(l))) {
    fail(ErrorCode::kMetric, std::string(which) + " layout has zero volume");
  }
}

}  // namespace

double polygon_intersection_area(const Polygon& p, const Polygon& q) {
  if (p.size() < 3 || q.size() < 3) return 0.0;
  // The indicator of a polygon is the signed sum of its fan triangles, so
  // the intersection area is the signed sum over all triangle pairs.
  const auto fp = fan(p);
  const auto fq = fan(q);
  double sum = 0.0;
  for (const auto& [tp, sp] : fp) {
    for (const auto& [tq, sq] : fq) sum += sp * sq * clipped_area(tp, tq);
  }
  // Both fans carry the polygon's own orientation sign.
  const double orient = (polygon::signed_area(p) >= 0.0 ? 1.0 : -1.0) *
                        (polygon::signed_area(q) >= 0.0 ? 1.0 : -1.0);
  return std::max(0.0, orient * sum);
}

double iou3d(const Layout& pred, const Layout& gt) {
  check_layout(pred, "predicted");
  check_layout(gt, "ground-truth");
  const double dz = std::min(pred.h_c, gt.h_c) - std::max(pred.h_f, gt.h_f);
  if (dz <= 0.0) return 0.0;
  const double inter =
      polygon_intersection_area(pred.vertices, gt.vertices) * dz;
  const double uni = volume(pred) + volume(gt) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

ScaledIou iou3d_u2s(const Layout& pred, const Layout& gt, double min_scale,
                    double max_scale) {
  if (!(min_scale > 0.0) || !(max_scale >= min_scale)) {
    fail(ErrorCode::kInvalidArgument, "invalid u2s scale interval");
  }
  const auto f = [&](double log_s) {
    return iou3d(pred.scaled(std::exp(log_s)), gt);
  };
  const double lo = std::log(min_scale);
  const double hi = std::log(max_scale);
  constexpr int kSamples = 64;
  double best_x = lo;
  double best_f = -1.0;
  int best_k = 0;
  for (int k = 0; k < kSamples; ++k) {
    const double x = lo + (hi - lo) * k / (kSamples - 1);
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
      best_k = k;
    }
  }
  // Golden-section refinement inside the bracketing grid cells.
  const double step = (hi - lo) / (kSamples - 1);
  double a = std::max(lo, lo + (best_k - 1) * step);
  double b = std::min(hi, lo + (best_k + 1) * step);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fx > best_f) {
    best_f = fx;
    best_x = x;
  }
  ScaledIou out{best_f, std::exp(best_x)};
  if (min_scale <= 1.0 && 1.0 <= max_scale) {
    const double unscaled = iou3d(pred, gt);
    if (unscaled >= out.iou) out = {unscaled, 1.0};
  }
  return out;
}

double layout_diagonal(const Layout& layout) {
  if (layout.vertices.empty()) return 0.0;
  Vec2 lo = layout.vertices.front();
  Vec2 hi = lo;
  for (const Vec2& v : layout.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vec2 ext = hi - lo;
  const double dz = layout.h_c - layout.h_f;
  return std::sqrt(ext.squaredNorm() + dz * dz);
}

CornerError corner_error(const Layout& pred, const Layout& gt) {
  const std::size_t n = gt.vertices.size();
  if (pred.vertices.size() != n) {
    fail(ErrorCode::kMetric,
         "corner count mismatch: predicted " +
             std::to_string(pred.vertices.size()) + ", ground truth " +
             std::to_string(n));
  }
  if (n == 0) fail(ErrorCode::kMetric, "layouts have no corners");
  const auto corner_distances = [&](std::size_t shift) {
    std::vector<double> out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 dxy = pred.vertices[(i + shift) % n] - gt.vertices[i];
      const double dc = pred.h_c - gt.h_c;
      const double df = pred.h_f - gt.h_f;
      out[i] = std::sqrt(dxy.squaredNorm() + dc * dc);
      out[n + i] = std::sqrt(dxy.squaredNorm() + df * df);
    }
    return out;
  };
  CornerError best;
  best.ce = std::numeric_limits<double>::infinity();
  for (std::size_t shift = 0; shift < n; ++shift) {
    std::vector<double> dist = corner_distances(shift);
    double mean = 0.0;
    for (double v : dist) mean += v;
    mean /= static_cast<double>(dist.size());
    if (mean < best.ce) {
      best.ce = mean;
      best.shift = shift;
      best.distances = std::move(dist);
    }
  }
  const double diag = layout_diagonal(gt);
  if (!(diag > 0.0)) fail(ErrorCode::kMetric, "ground-truth layout is empty");
  best.cen = best.ce / diag;
  return best;
}

EvaluationReport evaluate(const Layout& pred, const Layout& gt) {
  EvaluationReport r;
  r.iou3d = iou3d(pred, gt);
  const ScaledIou u2s = iou3d_u2s(pred, gt);
  r.iou3d_u2s = u2s.iou;
  r.scale_star = u2s.scale;
  const CornerError ce = corner_error(pred, gt);
  r.ce_meters = ce.ce;
  r.cen = ce.cen;
  r.corner_distances = ce.distances;
  return r;
}

}  // namespace ncpano
