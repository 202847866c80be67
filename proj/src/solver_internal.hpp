#pragma once

// Helpers shared by the solver translation units.

#include <vector>

#include <Eigen/Core>

#include "ncpano/solvers.hpp"

namespace ncpano::detail {

// side(ray, L) = u_coef . u + h_coef . (h u) + d_coef * d for the ceiling or
// floor line of a wall with horizontal direction u.
struct SideCoefficients {
  Vec2 u_coef;
  Vec2 h_coef;
  double d_coef = 0.0;
};

SideCoefficients side_coefficients(const ProjectingRay& ray);

// Coefficients for a wall whose direction is perp(u) expressed in u.
SideCoefficients rotate_quarter(const SideCoefficients& c);

// Accumulates a homogeneous system together with its elevation-derivative
// rows; rows are normalized to unit length on output (derivative rows share
// the factor), which makes solves invariant to per-ray scaling.
class RaySystem {
 public:
  explicit RaySystem(int cols) : cols_(cols) {}

  int cols() const { return cols_; }
  Eigen::Index rows() const { return static_cast<Eigen::Index>(rows_.size()); }

  void add(const Eigen::VectorXd& row, const Eigen::VectorXd& derivative);

  Eigen::MatrixXd normalized() const;
  Eigen::MatrixXd normalized_derivative() const;

 private:
  int cols_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<Eigen::VectorXd> derivatives_;
};

// Smallest-to-largest singular value ratio test helpers.
double sigma_ratio(const Eigen::VectorXd& descending, int k);
int count_null(const Eigen::VectorXd& descending, double tolerance);

// Algebraic cost of x: x^T M x / x^T B x (kNoiseCompensated) or
// |A x|^2 / |x|^2 (kSvd).
double algebraic_cost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& da,
                      const Eigen::VectorXd& x, NullSpaceMethod method);

// Result of enforcing parallelism on a 2-vector null space.
struct ParallelSolution {
  Eigen::VectorXd vector;
  LambdaSolution lambda;
  bool fallback = false;
  double h_c = 0.0;
  double h_f = 0.0;
};

ParallelSolution enforce_parallelism(const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& da,
                                     const NullSpaceParam& nsp,
                                     const SolverOptions& options,
                                     std::vector<std::string>* warnings);

// Least-squares height ratio: argmin_h |x - h u|.
double height_ratio(const Vec2& u, const Vec2& x);

// Fills max/rms |side| of every ray against its wall's lines.
void fill_residuals(const std::vector<WallRays>& rays,
                    const std::vector<Wall>& walls, Diagnostics* diag);

}  // namespace ncpano::detail
