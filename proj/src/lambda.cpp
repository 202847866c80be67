#include <algorithm>
#include <cmath>
#include <optional>

#include "ncpano/error.hpp"
#include "solver_internal.hpp"

namespace ncpano {

namespace {

struct QuadraticRoots {
  std::vector<double> roots;
  bool complex = false;  // roots holds the real part of a complex pair
};

// Real roots of a x^2 + b x + c. An identically vanishing polynomial is
// satisfied by any lambda; it reports the single root 0.
QuadraticRoots solve_quadratic(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale < 1e-13) return {{0.0}, false};
  if (std::abs(a) <= 1e-12 * scale) {
    if (std::abs(b) <= 1e-12 * scale) return {{}, true};
    return {{-c / b}, false};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    if (disc >= -1e-12 * b * b) return {{-b / (2.0 * a)}, false};
    return {{-b / (2.0 * a)}, true};
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return {{0.0}, false};
  double r0 = q / a;
  double r1 = c / q;
  if (r0 > r1) std::swap(r0, r1);
  return {{r0, r1}, false};
}

// cross(u0 + l u1, x0 + l x1) as a quadratic in l.
QuadraticRoots parallel_roots(const Eigen::VectorXd& w0,
                              const Eigen::VectorXd& w1, int offset) {
  const Vec2 u0 = w0.segment<2>(0);
  const Vec2 u1 = w1.segment<2>(0);
  const Vec2 x0 = w0.segment<2>(offset);
  const Vec2 x1 = w1.segment<2>(offset);
  return solve_quadratic(cross2(u1, x1), cross2(u0, x1) + cross2(u1, x0),
                         cross2(u0, x0));
}

std::optional<LambdaCandidate> make_candidate(const Eigen::VectorXd& w0,
                                              const Eigen::VectorXd& w1,
                                              double lv, double lw) {
  LambdaCandidate c;
  c.lambda_v = lv;
  c.lambda_w = lw;
  c.lambda = 0.5 * (lv + lw);
  const Eigen::VectorXd w = w0 + c.lambda * w1;
  const Vec2 u = w.segment<2>(0);
  if (u.norm() < 1e-12 * w.norm()) return std::nullopt;
  c.h_c = detail::height_ratio(u, w.segment<2>(2));
  c.h_f = detail::height_ratio(u, w.segment<2>(4));
  return c;
}

}  // namespace

double LambdaCandidate::mismatch() const {
  return std::abs(lambda_v - lambda_w) / (1.0 + std::abs(lambda));
}

LambdaSolution solve_lambda(const NullSpaceParam& nsp,
                            double lambda_tolerance) {
  if (nsp.basis.size() != 2) {
    fail(ErrorCode::kInvalidArgument,
         "lambda resolution needs exactly two null-space vectors");
  }
  const Eigen::VectorXd& w0 = nsp.basis[0];
  const Eigen::VectorXd& w1 = nsp.basis[1];
  if (w0.size() < 6 || w1.size() != w0.size()) {
    fail(ErrorCode::kInvalidArgument, "null-space vectors too short");
  }
  const QuadraticRoots rv = parallel_roots(w0, w1, 2);
  const QuadraticRoots rw = parallel_roots(w0, w1, 4);
  if ((rv.complex || rv.roots.empty()) && (rw.complex || rw.roots.empty())) {
    fail(ErrorCode::kNoRealSolution,
         "both parallelism quadratics have complex roots");
  }

  std::vector<std::pair<double, double>> pairs;
  const std::vector<double>& a = rv.roots.empty() ? rw.roots : rv.roots;
  const std::vector<double>& b = rw.roots.empty() ? rv.roots : rw.roots;
  const bool swapped = rv.roots.empty();
  const auto add_pair = [&](double x, double y) {
    if (swapped) std::swap(x, y);
    pairs.emplace_back(x, y);
  };
  const auto rel = [](double x, double y) {
    return std::abs(x - y) / (1.0 + 0.5 * std::abs(x + y));
  };
  if (a.size() == 2 && b.size() == 2) {
    const double straight = rel(a[0], b[0]) + rel(a[1], b[1]);
    const double crossed = rel(a[0], b[1]) + rel(a[1], b[0]);
    if (straight <= crossed) {
      add_pair(a[0], b[0]);
      add_pair(a[1], b[1]);
    } else {
      add_pair(a[0], b[1]);
      add_pair(a[1], b[0]);
    }
  } else {
    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    const bool flip = a.size() > b.size();
    for (double x : shorter) {
      const double y = *std::min_element(
          longer.begin(), longer.end(),
          [&](double p, double q) { return rel(x, p) < rel(x, q); });
      if (flip) {
        add_pair(y, x);
      } else {
        add_pair(x, y);
      }
    }
  }

  LambdaSolution out;
  for (const auto& [lv, lw] : pairs) {
    if (auto c = make_candidate(w0, w1, lv, lw)) out.candidates.push_back(*c);
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const LambdaCandidate& x, const LambdaCandidate& y) {
                     return x.mismatch() < y.mismatch();
                   });
  const auto it = std::find_if(
      out.candidates.begin(), out.candidates.end(),
      [](const LambdaCandidate& c) { return c.h_c > c.h_f; });
  if (it == out.candidates.end()) {
    fail(ErrorCode::kInfeasibleLayout,
         "no lambda root places the ceiling above the floor");
  }
  out.chosen = static_cast<std::size_t>(it - out.candidates.begin());
  out.lambda = it->lambda;
  out.lambda_v = it->lambda_v;
  out.lambda_w = it->lambda_w;
  out.h_c = it->h_c;
  out.h_f = it->h_f;
  out.consistent =
      !rv.complex && !rw.complex && it->mismatch() <= lambda_tolerance;
  return out;
}

namespace detail {

ParallelSolution enforce_parallelism(const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& da,
                                     const NullSpaceParam& nsp,
                                     const SolverOptions& options,
                                     std::vector<std::string>* warnings) {
  ParallelSolution out;
  const Eigen::VectorXd& w0 = nsp.basis[0];
  std::optional<Error> lambda_error;
  try {
    out.lambda = solve_lambda(nsp, options.lambda_tolerance);
    out.vector = w0 + out.lambda.lambda * nsp.basis[1];
    const double cost0 = algebraic_cost(a, da, w0, options.method);
    const double cost = algebraic_cost(a, da, out.vector, options.method);
    const double ratio2 = options.lambda_cost_ratio * options.lambda_cost_ratio;
    if (cost > ratio2 * cost0 + 1e-24) {
      out.fallback = true;
      warnings->push_back(
          "lambda root leaves the null space (cost ratio " +
          std::to_string(std::sqrt(cost / std::max(cost0, 1e-300))) +
          "); projecting the smallest null vector instead");
    }
    if (!out.lambda.consistent) {
      warnings->push_back("parallelism roots disagree: |lambda_v - lambda_w| = " +
                          std::to_string(std::abs(out.lambda.lambda_v -
                                                  out.lambda.lambda_w)));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoRealSolution &&
        e.code() != ErrorCode::kInfeasibleLayout) {
      throw;
    }
    lambda_error = e;
    out.fallback = true;
    warnings->push_back(std::string("lambda resolution failed (") + e.what() +
                        "); projecting the smallest null vector instead");
  }
  if (out.fallback) out.vector = w0;
  const Vec2 u = out.vector.segment<2>(0);
  out.h_c = height_ratio(u, out.vector.segment<2>(2));
  out.h_f = height_ratio(u, out.vector.segment<2>(4));
  if (out.fallback && !(out.h_c > out.h_f)) {
    if (lambda_error) throw *lambda_error;
    fail(ErrorCode::kInfeasibleLayout,
         "projected solution places the ceiling below the floor");
  }
  return out;
}

}  // namespace detail

}  // namespace ncpano
