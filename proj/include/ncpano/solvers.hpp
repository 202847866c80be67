#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ncpano/geometry.hpp"
#include "ncpano/layout.hpp"
#include "ncpano/scene.hpp"

namespace ncpano {

// Rays observed on the ceiling and floor boundary of one wall.
struct WallRays {
  std::vector<ProjectingRay> ceiling;
  std::vector<ProjectingRay> floor;
};

// How the approximate null space of a ray system is extracted.
//  kSvd: right singular vectors of the (row-normalized) system.
//  kNoiseCompensated: generalized eigenvectors of (A^T A, A^T A + D^T D),
//    D holding the row derivatives w.r.t. ray elevation. Identical to kSvd
//    on exact data; removes the attenuation bias of kSvd when boundary
//    elevations are noisy.
enum class NullSpaceMethod { kSvd, kNoiseCompensated };

struct SolverOptions {
  NullSpaceMethod method = NullSpaceMethod::kNoiseCompensated;
  // sigma_k / sigma_1 below this counts as a null direction (diagnostics).
  double rank_tolerance = 1e-8;
  // Over-determined single-wall and joint solvers: sigma_3 / sigma_1 below
  // this means the null space is larger than 2 (e.g. central camera).
  double degenerate_tolerance = 1e-10;
  // Relative |lambda_v - lambda_w| tolerance, scaled by (1 + |lambda|).
  double lambda_tolerance = 1e-3;
  // Reject a lambda whose algebraic cost exceeds this multiple of the cost of
  // the smallest null vector (falls back to projecting that vector).
  double lambda_cost_ratio = 4.0;
  // Atlanta: smallest admissible |first component| of the unit null vector.
  double pin_tolerance = 1e-6;
  // Reconstruction.
  int max_rays_per_line = 64;
  double corner_threshold = 0.5;
  int min_corner_separation = 4;
  int segment_margin = 2;
  bool insert_hidden_walls = true;
  // Relative offset below which two consecutive parallel walls are merged.
  double merge_tolerance = 0.02;

  static SolverOptions noise_free() { return {}; }
  static SolverOptions noisy() {
    SolverOptions o;
    o.rank_tolerance = 1e-4;
    return o;
  }
};

// Null-space parameterization W = basis[0] + lambda_1 basis[1] + ...
struct NullSpaceParam {
  std::vector<Eigen::VectorXd> basis;  // orthonormal, ascending cost
  Eigen::VectorXd singular_values;     // descending, zero-padded to cols
};

struct LambdaCandidate {
  double lambda_v = 0.0;
  double lambda_w = 0.0;
  double lambda = 0.0;
  double h_c = 0.0;
  double h_f = 0.0;

  double mismatch() const;  // |lambda_v - lambda_w| / (1 + |lambda|)
};

struct LambdaSolution {
  double lambda = 0.0;
  double lambda_v = 0.0;
  double lambda_w = 0.0;
  double h_c = 0.0;
  double h_f = 0.0;
  bool consistent = true;
  // Every paired root; `chosen` indexes the returned one.
  std::vector<LambdaCandidate> candidates;
  std::size_t chosen = 0;
};

struct Diagnostics {
  Eigen::VectorXd singular_values;
  int null_dimension = 0;
  LambdaSolution lambda;
  bool lambda_fallback = false;
  double max_residual = 0.0;
  double rms_residual = 0.0;
  std::vector<std::string> warnings;
};

struct WallEstimate {
  Wall wall;
  Diagnostics diagnostics;
};

struct WallCandidate {
  Wall wall;
  bool ceiling_above_floor = true;
  double residual = 0.0;  // max |side| over the four input rays
};

struct LayoutSolution {
  Mode mode = Mode::kManhattan;
  // One wall per footprint edge, edge k running from footprint[k] to
  // footprint[k + 1].
  std::vector<Wall> walls;
  std::vector<bool> observed;  // false for inferred hidden walls
  Polygon footprint;           // counter-clockwise
  double h_c = 0.0;
  double h_f = 0.0;
  Diagnostics diagnostics;
  std::vector<Diagnostics> per_wall;
  Vec2 manhattan_direction = Vec2::UnitX();

  Layout layout() const { return {footprint, h_c, h_f}; }
};

struct DirectionClasses {
  Vec2 u = Vec2::UnitX();
  std::vector<int> classes;      // 0: parallel to u, 1: parallel to perp(u)
  std::vector<bool> ambiguous;   // within 5 degrees of the 45 degree boundary
};

// One row per ray. Columns (u_x, u_y, v_x, v_y, w_x, w_y, d), v = h_c u,
// w = h_f u. Ceiling rows have zero w coefficients; floor rows zero v.
Eigen::MatrixXd build_wall_system(const std::vector<ProjectingRay>& ceiling,
                                  const std::vector<ProjectingRay>& floor);

// `k` smallest directions of `system`. `derivative` (same shape, may be
// empty for kSvd) holds d(row)/d(elevation).
NullSpaceParam null_space(const Eigen::MatrixXd& system,
                          const Eigen::MatrixXd& derivative, int k,
                          NullSpaceMethod method);

// Enforces u || v and u || w on W = basis[0] + lambda basis[1]. Reads the
// (u, v, w) slots at offsets 0, 2, 4 of each basis vector.
LambdaSolution solve_lambda(const NullSpaceParam& nsp,
                            double lambda_tolerance = 1e-3);

WallEstimate solve_wall_overdetermined(const WallRays& rays,
                                       const SolverOptions& options = {});

std::vector<WallCandidate> solve_wall_minimal(const WallRays& rays,
                                              const SolverOptions& options = {});

LayoutSolution solve_manhattan(const std::vector<WallRays>& walls,
                               const std::vector<int>& direction_class,
                               const SolverOptions& options = {});

LayoutSolution solve_atlanta(const std::vector<WallRays>& walls,
                             const std::vector<Vec2>& directions,
                             const SolverOptions& options = {});

DirectionClasses estimate_direction_classes(
    const std::vector<Vec2>& directions,
    const std::vector<double>& weights = {});

LayoutSolution reconstruct_layout(const BoundaryObservation& obs, Mode mode,
                                  const SolverOptions& options = {});

// Rays of one wall segment, trimmed and subsampled per `options`.
WallRays collect_wall_rays(const BoundaryObservation& obs,
                           const ColumnRange& segment,
                           const SolverOptions& options);

}  // namespace ncpano
