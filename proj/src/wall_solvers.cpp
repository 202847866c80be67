#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ncpano/error.hpp"
#include "solver_internal.hpp"

namespace ncpano {

namespace {

Eigen::VectorXd wall_row(const ProjectingRay& ray, bool ceiling) {
  const auto c = detail::side_coefficients(ray);
  Eigen::VectorXd row = Eigen::VectorXd::Zero(7);
  row.segment<2>(0) = c.u_coef;
  row.segment<2>(ceiling ? 2 : 4) = c.h_coef;
  row(6) = c.d_coef;
  return row;
}

detail::RaySystem wall_ray_system(const WallRays& rays) {
  detail::RaySystem sys(7);
  for (const auto& r : rays.ceiling) {
    sys.add(wall_row(r, true), wall_row(r.elevation_derivative(), true));
  }
  for (const auto& r : rays.floor) {
    sys.add(wall_row(r, false), wall_row(r.elevation_derivative(), false));
  }
  return sys;
}

// Wall from a homogeneous (u, v, w, d) vector in the |u| = 1, d > 0 gauge.
// Returns false when u or d vanishes.
bool wall_from_vector(const Eigen::VectorXd& x, double h_c, double h_f,
                      Wall* out) {
  Vec2 u = x.segment<2>(0);
  const double n = u.norm();
  if (!(n > 1e-12 * x.norm())) return false;
  double d = x(6) / n;
  u /= n;
  if (d < 0.0) {
    u = -u;
    d = -d;
  }
  if (!(d > 0.0)) return false;
  out->frame = WallFrame::from_direction(u);
  out->d = d;
  out->h_c = h_c;
  out->h_f = h_f;
  return true;
}

// Polynomials as coefficient vectors, lowest degree first.
using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

Poly poly_scale(const Poly& a, double s) {
  Poly r = a;
  for (double& c : r) c *= s;
  return r;
}

double poly_eval(const Poly& p, double x) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

double poly_deriv_eval(const Poly& p, double x) {
  double r = 0.0;
  for (std::size_t i = p.size() - 1; i >= 1; --i) {
    r = r * x + static_cast<double>(i) * p[i];
  }
  return r;
}

// Real roots via companion-matrix eigenvalues, polished by Newton steps.
std::vector<double> real_roots(Poly p) {
  const double scale =
      std::abs(*std::max_element(p.begin(), p.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      }));
  if (scale == 0.0) return {};
  while (p.size() > 1 && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
  const int n = static_cast<int>(p.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) companion(0, i) = -p[n - 1 - i] / p[n];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      const double dp = poly_deriv_eval(p, x);
      if (dp == 0.0) break;
      const double step = poly_eval(p, x) / dp;
      x -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

// cross(u(c), x(c)) for c = (1, s, t) written as A t^2 + B(s) t + C(s).
struct Conic {
  double a = 0.0;
  Poly b;
  Poly c;
};

Conic parallel_conic(const std::array<Eigen::VectorXd, 3>& w, int offset) {
  const auto k = [&](int i, int j) {
    return cross2(w[i].segment<2>(0), w[j].segment<2>(offset));
  };
  Conic q;
  q.a = k(2, 2);
  q.b = {k(0, 2) + k(2, 0), k(1, 2) + k(2, 1)};
  q.c = {k(0, 0), k(0, 1) + k(1, 0), k(1, 1)};
  return q;
}

double conic_eval(const Conic& q, double s, double t) {
  return q.a * t * t + poly_eval(q.b, s) * t + poly_eval(q.c, s);
}

}  // namespace

WallEstimate solve_wall_overdetermined(const WallRays& rays,
                                       const SolverOptions& options) {
  if (rays.ceiling.size() < 3 || rays.floor.size() < 3) {
    fail(ErrorCode::kInvalidArgument,
         "over-determined wall solve needs at least 3 ceiling and 3 floor "
         "rays");
  }
  const detail::RaySystem sys = wall_ray_system(rays);
  const Eigen::MatrixXd a = sys.normalized();
  const Eigen::MatrixXd da = sys.normalized_derivative();
  const NullSpaceParam nsp = null_space(a, da, 2, options.method);
  if (detail::sigma_ratio(nsp.singular_values, 3) <
      options.degenerate_tolerance) {
    fail(ErrorCode::kDegenerate,
         "wall rays leave more than two null directions (concurrent rays: "
         "scale unobservable)");
  }

  WallEstimate out;
  Diagnostics& diag = out.diagnostics;
  diag.singular_values = nsp.singular_values;
  diag.null_dimension = detail::count_null(nsp.singular_values,
                                           options.rank_tolerance);
  const detail::ParallelSolution par =
      detail::enforce_parallelism(a, da, nsp, options, &diag.warnings);
  diag.lambda = par.lambda;
  diag.lambda_fallback = par.fallback;
  if (!wall_from_vector(par.vector, par.h_c, par.h_f, &out.wall)) {
    fail(ErrorCode::kInfeasibleLayout,
         "wall solution has a vanishing direction or distance");
  }
  detail::fill_residuals({rays}, {out.wall}, &diag);
  return out;
}

std::vector<WallCandidate> solve_wall_minimal(const WallRays& rays,
                                              const SolverOptions& options) {
  if (rays.ceiling.size() != 2 || rays.floor.size() != 2) {
    fail(ErrorCode::kInvalidArgument,
         "minimal wall solve needs exactly 2 ceiling and 2 floor rays");
  }
  const Eigen::MatrixXd a = wall_ray_system(rays).normalized();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::VectorXd sv = Eigen::VectorXd::Zero(7);
  sv.head(svd.singularValues().size()) = svd.singularValues();
  if (detail::sigma_ratio(sv, 4) < options.degenerate_tolerance) {
    fail(ErrorCode::kDegenerate,
         "minimal wall rays are linearly dependent (null space is not "
         "three-dimensional)");
  }
  const std::array<Eigen::VectorXd, 3> w = {
      svd.matrixV().col(4), svd.matrixV().col(5), svd.matrixV().col(6)};
  const Conic q1 = parallel_conic(w, 2);
  const Conic q2 = parallel_conic(w, 4);

  // Sylvester resultant of the two conics in t.
  const Poly a1c2_a2c1 = poly_sub(poly_scale(q2.c, q1.a), poly_scale(q1.c, q2.a));
  const Poly a1b2_a2b1 = poly_sub(poly_scale(q2.b, q1.a), poly_scale(q1.b, q2.a));
  const Poly b1c2_b2c1 = poly_sub(poly_mul(q1.b, q2.c), poly_mul(q2.b, q1.c));
  const Poly resultant = poly_sub(poly_mul(a1c2_a2c1, a1c2_a2c1),
                                  poly_mul(a1b2_a2b1, b1c2_b2c1));

  std::vector<WallCandidate> out;
  for (double s : real_roots(resultant)) {
    // Common root in t: eliminate t^2 between the two conics.
    std::vector<double> ts;
    const double num = poly_eval(a1c2_a2c1, s);
    const double den = -poly_eval(a1b2_a2b1, s);
    if (std::abs(den) > 1e-12 * (std::abs(num) + 1.0)) {
      ts.push_back(num / den);
    } else {
      const double qa = q1.a;
      const double qb = poly_eval(q1.b, s);
      const double qc = poly_eval(q1.c, s);
      if (std::abs(qa) > 1e-14) {
        const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
        ts.push_back((-qb + std::sqrt(disc)) / (2.0 * qa));
        ts.push_back((-qb - std::sqrt(disc)) / (2.0 * qa));
      } else if (std::abs(qb) > 1e-14) {
        ts.push_back(-qc / qb);
      }
    }
    if (ts.empty()) continue;
    const double t = *std::min_element(ts.begin(), ts.end(), [&](double x,
                                                                 double y) {
      return std::abs(conic_eval(q1, s, x)) + std::abs(conic_eval(q2, s, x)) <
             std::abs(conic_eval(q1, s, y)) + std::abs(conic_eval(q2, s, y));
    });
    const Eigen::VectorXd x = w[0] + s * w[1] + t * w[2];
    const Vec2 u = x.segment<2>(0);
    // The resultant always carries the u = 0 root, on which both
    // parallelism conditions hold trivially.
    if (u.norm() < 1e-9 * x.norm()) continue;
    WallCandidate cand;
    if (!wall_from_vector(x, detail::height_ratio(u, x.segment<2>(2)),
                          detail::height_ratio(u, x.segment<2>(4)),
                          &cand.wall)) {
      continue;
    }
    cand.ceiling_above_floor = cand.wall.h_c > cand.wall.h_f;
    Diagnostics diag;
    detail::fill_residuals({rays}, {cand.wall}, &diag);
    cand.residual = diag.max_residual;
    const bool duplicate = std::any_of(
        out.begin(), out.end(), [&](const WallCandidate& o) {
          return (o.wall.frame.e1 - cand.wall.frame.e1).norm() < 1e-9 &&
                 std::abs(o.wall.d - cand.wall.d) < 1e-9 * (1.0 + o.wall.d) &&
                 std::abs(o.wall.h_c - cand.wall.h_c) < 1e-9 &&
                 std::abs(o.wall.h_f - cand.wall.h_f) < 1e-9;
        });
    if (!duplicate) out.push_back(cand);
  }
  if (out.empty()) {
    fail(ErrorCode::kNoRealSolution, "minimal wall solve has no real root");
  }
  return out;
}

}  // namespace ncpano
