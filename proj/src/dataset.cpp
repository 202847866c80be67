#include "ncpano/dataset.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "ncpano/error.hpp"

namespace ncpano {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index,
                         std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, Interval range) {
  return std::uniform_real_distribution<double>(range.lo, range.hi)(rng);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return uniform(rng, Interval{lo, hi});
}

int pick_wall_count(std::mt19937_64& rng, const DatasetSpec& spec) {
  if (spec.mode == Mode::kManhattan) {
    const int lo = (spec.walls_min + 1) / 2;
    const int hi = spec.walls_max / 2;
    return 2 * std::uniform_int_distribution<int>(lo, hi)(rng);
  }
  return std::uniform_int_distribution<int>(spec.walls_min, spec.walls_max)(rng);
}

double subtended_angle(const Vec2& a, const Vec2& b, const Vec2& at) {
  const Vec2 pa = a - at;
  const Vec2 pb = b - at;
  return std::abs(std::atan2(cross2(pa, pb), pa.dot(pb)));
}

// Camera-placement admissibility for a footprint seen from `at`.
bool admissible_view(const Polygon& poly, const DatasetSpec& spec,
                     const Vec2& at) {
  const double keep_out = spec.camera_radius + spec.clearance;
  if (!polygon::contains(poly, at)) return false;
  if (polygon::boundary_distance(poly, at) < keep_out) return false;
  if (spec.allow_hidden_walls) return true;
  if (polygon::min_interior_line_distance(poly, at) < keep_out) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (subtended_angle(poly[i], poly[(i + 1) % poly.size()], at) <
        spec.min_wall_span) {
      return false;
    }
  }
  return true;
}

bool admissible_shape(const Polygon& poly) {
  return polygon::is_simple(poly) && polygon::signed_area(poly) > 0.0;
}

// Replaces convex vertex k by a rectangular notch.
Polygon carve_corner(const Polygon& poly, std::size_t k, double depth_prev,
                     double depth_next) {
  const std::size_t n = poly.size();
  const Vec2 v = poly[k];
  const Vec2 to_prev = (poly[(k + n - 1) % n] - v).normalized();
  const Vec2 to_next = (poly[(k + 1) % n] - v).normalized();
  Polygon out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != k) {
      out.push_back(poly[i]);
      continue;
    }
    out.push_back(v + depth_prev * to_prev);
    out.push_back(v + depth_prev * to_prev + depth_next * to_next);
    out.push_back(v + depth_next * to_next);
  }
  return out;
}

std::optional<Polygon> try_manhattan(std::mt19937_64& rng,
                                     const DatasetSpec& spec, int walls) {
  const double x0 = -uniform(rng, spec.room_extent);
  const double x1 = uniform(rng, spec.room_extent);
  const double y0 = -uniform(rng, spec.room_extent);
  const double y1 = uniform(rng, spec.room_extent);
  Polygon poly{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  const int carves = (walls - 4) / 2;
  for (int c = 0; c < carves; ++c) {
    bool carved = false;
    for (int attempt = 0; attempt < 50 && !carved; ++attempt) {
      const std::size_t n = poly.size();
      const std::size_t k =
          std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      const Vec2 prev = poly[(k + n - 1) % n];
      const Vec2 next = poly[(k + 1) % n];
      if (cross2(poly[k] - prev, next - poly[k]) <= 0.0) continue;  // reflex
      const double a = uniform(rng, 0.2, 0.7) * (prev - poly[k]).norm();
      const double b = uniform(rng, 0.2, 0.7) * (next - poly[k]).norm();
      Polygon candidate = carve_corner(poly, k, a, b);
      if (!admissible_shape(candidate)) continue;
      if (!admissible_view(candidate, spec, Vec2::Zero())) continue;
      poly = std::move(candidate);
      carved = true;
    }
    if (!carved) return std::nullopt;
  }
  if (!admissible_view(poly, spec, Vec2::Zero())) return std::nullopt;
  const Eigen::Rotation2Dd rot(uniform(rng, 0.0, kTwoPi));
  for (auto& v : poly) v = rot * v;
  return poly;
}

std::optional<Polygon> try_atlanta(std::mt19937_64& rng,
                                   const DatasetSpec& spec, int walls) {
  std::vector<double> gaps(walls);
  double total = 0.0;
  for (auto& g : gaps) {
    g = uniform(rng, 0.5, 1.5);
    total += g;
  }
  const double start = uniform(rng, 0.0, kTwoPi);
  Polygon poly;
  double angle = start;
  for (int i = 0; i < walls; ++i) {
    const double gap = gaps[i] * kTwoPi / total;
    if (gap >= std::numbers::pi - 0.2) return std::nullopt;
    const double r = uniform(rng, spec.room_extent);
    poly.emplace_back(r * std::cos(angle), r * std::sin(angle));
    angle += gap;
  }
  if (!admissible_shape(poly)) return std::nullopt;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = (poly[i] - poly[(i + n - 1) % n]).normalized();
    const Vec2 e1 = (poly[(i + 1) % n] - poly[i]).normalized();
    const double turn = std::abs(std::atan2(cross2(e0, e1), e0.dot(e1)));
    if (turn < spec.min_corner_turn) return std::nullopt;
  }
  if (!admissible_view(poly, spec, Vec2::Zero())) return std::nullopt;
  return poly;
}

}  // namespace

void DatasetSpec::validate() const {
  const auto bad = [](const std::string& what) {
    fail(ErrorCode::kInvalidArgument, "invalid dataset spec: " + what);
  };
  if (n_layouts < 1) bad("n_layouts must be >= 1");
  if (walls_max < walls_min) bad("walls_max < walls_min");
  if (mode == Mode::kManhattan) {
    if (walls_min < 4) bad("manhattan rooms need at least 4 walls");
    if ((walls_min + 1) / 2 > walls_max / 2) {
      bad("manhattan wall range contains no even count");
    }
  } else if (walls_min < 3) {
    bad("atlanta rooms need at least 3 walls");
  }
  if (!(ceiling_height.lo > 0.0 && ceiling_height.hi >= ceiling_height.lo)) {
    bad("ceiling height range must be positive");
  }
  if (!(floor_height.hi < 0.0 && floor_height.hi >= floor_height.lo)) {
    bad("floor height range must be negative");
  }
  if (!(room_extent.lo > camera_radius + clearance &&
        room_extent.hi >= room_extent.lo)) {
    bad("room extent must exceed camera radius plus clearance");
  }
  if (!(camera_radius > 0.0)) bad("camera radius must be positive");
  if (poses_per_layout < 1) bad("poses_per_layout must be >= 1");
  if (max_attempts < 1) bad("max_attempts must be >= 1");
}

Layout generate_layout(const DatasetSpec& spec, std::size_t index) {
  spec.validate();
  auto rng = make_rng(spec.seed, index, 0);
  const int walls = pick_wall_count(rng, spec);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const auto poly = spec.mode == Mode::kManhattan
                          ? try_manhattan(rng, spec, walls)
                          : try_atlanta(rng, spec, walls);
    if (!poly) continue;
    Layout layout;
    layout.vertices = *poly;
    layout.h_c = uniform(rng, spec.ceiling_height);
    layout.h_f = uniform(rng, spec.floor_height);
    return layout;
  }
  fail(ErrorCode::kGeneration,
       "rejection sampling failed for layout " + std::to_string(index) +
           " (" + std::to_string(walls) + " walls)" +
           " after " + std::to_string(spec.max_attempts) + " attempts");
}

Layout generate_pose(const DatasetSpec& spec, std::size_t index, int pose) {
  Layout base = generate_layout(spec, index);
  if (pose == 0) return base;
  if (pose < 0 || pose >= spec.poses_per_layout) {
    fail(ErrorCode::kInvalidArgument, "pose index out of range");
  }
  auto rng = make_rng(spec.seed, index, static_cast<std::uint64_t>(pose));
  Vec2 lo = base.vertices.front();
  Vec2 hi = lo;
  for (const auto& v : base.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const Vec2 at(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()));
    if (admissible_view(base.vertices, spec, at)) return base.translated(-at);
  }
  fail(ErrorCode::kGeneration, "no admissible camera placement for layout " +
                                   std::to_string(index) + " pose " +
                                   std::to_string(pose));
}

std::vector<Layout> generate_dataset(const DatasetSpec& spec) {
  std::vector<Layout> out;
  out.reserve(spec.n_layouts);
  for (std::size_t i = 0; i < spec.n_layouts; ++i) {
    out.push_back(generate_layout(spec, i));
  }
  return out;
}

bool has_hidden_wall(const Layout& layout) {
  return polygon::min_interior_line_distance(layout.vertices, Vec2::Zero()) <=
         0.0;
}

}  // namespace ncpano
