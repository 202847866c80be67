#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ncpano/error.hpp"
#include "solver_internal.hpp"

namespace ncpano {

namespace detail {

SideCoefficients side_coefficients(const ProjectingRay& ray) {
  const Vec3& dir = ray.direction;
  const Vec3& mom = ray.moment;
  return {Vec2(mom.x(), mom.y()), Vec2(dir.y(), -dir.x()), -dir.z()};
}

SideCoefficients rotate_quarter(const SideCoefficients& c) {
  // a . perp(u) = (a_y, -a_x) . u
  return {Vec2(c.u_coef.y(), -c.u_coef.x()), Vec2(c.h_coef.y(), -c.h_coef.x()),
          c.d_coef};
}

void RaySystem::add(const Eigen::VectorXd& row,
                    const Eigen::VectorXd& derivative) {
  rows_.push_back(row);
  derivatives_.push_back(derivative);
}

Eigen::MatrixXd RaySystem::normalized() const {
  Eigen::MatrixXd a(rows(), cols_);
  for (Eigen::Index i = 0; i < rows(); ++i) {
    const double n = rows_[i].norm();
    a.row(i) = rows_[i].transpose() / (n > 0.0 ? n : 1.0);
  }
  return a;
}

Eigen::MatrixXd RaySystem::normalized_derivative() const {
  Eigen::MatrixXd a(rows(), cols_);
  for (Eigen::Index i = 0; i < rows(); ++i) {
    const double n = rows_[i].norm();
    a.row(i) = derivatives_[i].transpose() / (n > 0.0 ? n : 1.0);
  }
  return a;
}

double sigma_ratio(const Eigen::VectorXd& descending, int k) {
  const Eigen::Index n = descending.size();
  if (n < k || descending(0) <= 0.0) return 0.0;
  return descending(n - k) / descending(0);
}

int count_null(const Eigen::VectorXd& descending, double tolerance) {
  if (descending.size() == 0 || descending(0) <= 0.0) {
    return static_cast<int>(descending.size());
  }
  int count = 0;
  for (Eigen::Index i = 0; i < descending.size(); ++i) {
    if (descending(i) / descending(0) < tolerance) ++count;
  }
  return count;
}

double algebraic_cost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& da,
                      const Eigen::VectorXd& x, NullSpaceMethod method) {
  const double ax = (a * x).squaredNorm();
  if (method == NullSpaceMethod::kSvd || da.size() == 0) {
    return ax / x.squaredNorm();
  }
  return ax / (ax + (da * x).squaredNorm());
}

double height_ratio(const Vec2& u, const Vec2& x) {
  return u.dot(x) / u.squaredNorm();
}

void fill_residuals(const std::vector<WallRays>& rays,
                    const std::vector<Wall>& walls, Diagnostics* diag) {
  double max_abs = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const PluckerLine ceiling = walls[i].ceiling_line();
    const PluckerLine floor = walls[i].floor_line();
    const auto accumulate = [&](const ProjectingRay& r, const PluckerLine& l) {
      const double s = side(r, l) / r.direction.norm();
      max_abs = std::max(max_abs, std::abs(s));
      sum_sq += s * s;
      ++count;
    };
    for (const auto& r : rays[i].ceiling) accumulate(r, ceiling);
    for (const auto& r : rays[i].floor) accumulate(r, floor);
  }
  diag->max_residual = max_abs;
  diag->rms_residual = count > 0 ? std::sqrt(sum_sq / count) : 0.0;
}

}  // namespace detail

Eigen::MatrixXd build_wall_system(const std::vector<ProjectingRay>& ceiling,
                                  const std::vector<ProjectingRay>& floor) {
  if (ceiling.empty() || floor.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "wall system needs at least one ceiling and one floor ray");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(ceiling.size() + floor.size()), 7);
  Eigen::Index row = 0;
  for (const auto& ray : ceiling) {
    const auto c = detail::side_coefficients(ray);
    a.row(row) << c.u_coef.x(), c.u_coef.y(), c.h_coef.x(), c.h_coef.y(), 0.0,
        0.0, c.d_coef;
    ++row;
  }
  for (const auto& ray : floor) {
    const auto c = detail::side_coefficients(ray);
    a.row(row) << c.u_coef.x(), c.u_coef.y(), 0.0, 0.0, c.h_coef.x(),
        c.h_coef.y(), c.d_coef;
    ++row;
  }
  return a;
}

NullSpaceParam null_space(const Eigen::MatrixXd& system,
                          const Eigen::MatrixXd& derivative, int k,
                          NullSpaceMethod method) {
  const Eigen::Index cols = system.cols();
  if (k < 1 || k > cols) {
    fail(ErrorCode::kInvalidArgument, "null-space dimension out of range");
  }
  NullSpaceParam out;
  out.singular_values = Eigen::VectorXd::Zero(cols);

  if (method == NullSpaceMethod::kSvd || derivative.size() == 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    out.singular_values.head(sv.size()) = sv;
    for (int i = 0; i < k; ++i) {
      out.basis.push_back(svd.matrixV().col(cols - 1 - i));
    }
    return out;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
  const auto& sv = svd.singularValues();
  out.singular_values.head(sv.size()) = sv;

  const Eigen::MatrixXd m = system.transpose() * system;
  const Eigen::MatrixXd b = m + derivative.transpose() * derivative;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(m, b);
  if (ges.info() != Eigen::Success) {
    fail(ErrorCode::kDegenerate,
         "noise-compensated null space: metric matrix is not positive "
         "definite");
  }
  // Gram-Schmidt keeps the span of the k smallest generalized eigenvectors.
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = ges.eigenvectors().col(i);
    for (const auto& q : out.basis) v -= q.dot(v) * q;
    out.basis.push_back(v.normalized());
  }
  return out;
}

}  // namespace ncpano
