#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncpano/dataset.hpp"
#include "ncpano/error.hpp"
#include "ncpano/metrics.hpp"
#include "ncpano/scene.hpp"
#include "ncpano/solvers.hpp"
#include "support.hpp"

namespace ncpano {
namespace {

using testing::kPi;

Vec2 at_angle(double deg) {
  const double a = deg * kPi / 180.0;
  return {std::cos(a), std::sin(a)};
}

Eigen::VectorXd wall_vector(const Wall& w) {
  Eigen::VectorXd x(7);
  const Vec2 u = w.frame.direction();
  x << u, w.h_c * u, w.h_f * u, w.d;
  return x;
}

TEST(BuildWallSystem, RowsEvaluateTheSideOperator) {
  std::mt19937_64 rng(1);
  const CameraRig rig;
  for (int i = 0; i < 50; ++i) {
    const Wall truth = testing::random_wall(rng);
    const WallRays rays = testing::wall_rays(rig, truth, 6);
    const Eigen::MatrixXd a = build_wall_system(rays.ceiling, rays.floor);
    ASSERT_EQ(a.rows(), 12);
    ASSERT_EQ(a.cols(), 7);
    EXPECT_LE((a * wall_vector(truth)).cwiseAbs().maxCoeff(), 1e-12);
    // Off the solution the row value is the side of the ray and the line.
    const Wall other = testing::random_wall(rng);
    const Eigen::VectorXd values = a * wall_vector(other);
    for (int k = 0; k < 6; ++k) {
      EXPECT_NEAR(values(k), side(rays.ceiling[k], other.ceiling_line()), 1e-12);
      EXPECT_NEAR(values(6 + k), side(rays.floor[k], other.floor_line()), 1e-12);
    }
  }
}

TEST(BuildWallSystem, RowsScaleWithRays) {
  const CameraRig rig;
  const WallRays rays = testing::wall_rays(rig, testing::make_wall(0.3, 2.0, 1.2, -1.4), 3);
  const Eigen::MatrixXd a = build_wall_system(rays.ceiling, rays.floor);
  const Eigen::MatrixXd b = build_wall_system({rays.ceiling[0].scaled(5.0)}, {rays.floor[0]});
  EXPECT_LE((b.row(0) - 5.0 * a.row(0)).norm(), 1e-12);
  EXPECT_LE((b.row(1) - a.row(3)).norm(), 1e-12);
}

TEST(BuildWallSystem, CeilingAndFloorBlocksAreSeparate) {
  const CameraRig rig;
  const WallRays rays = testing::wall_rays(rig, testing::make_wall(1.0, 2.5, 1.1, -1.3), 4);
  const Eigen::MatrixXd a = build_wall_system(rays.ceiling, rays.floor);
  EXPECT_EQ(a.block(0, 4, 4, 2).norm(), 0.0);
  EXPECT_EQ(a.block(4, 2, 4, 2).norm(), 0.0);
  EXPECT_THROW(build_wall_system({}, {}), Error);
}

TEST(SolveLambda, ZeroLambdaFixedPoint) {
  NullSpaceParam nsp;
  Eigen::VectorXd w0(7), w1(7);
  const Vec2 u0(0.6, 0.8);
  w0 << u0, 2.0 * u0, -1.5 * u0, 3.0;
  w1 << 0.3, -0.1, 0.7, 0.2, -0.4, 0.9, 0.5;
  nsp.basis = {w0, w1};
  const LambdaSolution sol = solve_lambda(nsp);
  EXPECT_NEAR(sol.lambda, 0.0, 1e-14);
  EXPECT_NEAR(sol.h_c, 2.0, 1e-14);
  EXPECT_NEAR(sol.h_f, -1.5, 1e-14);
  EXPECT_TRUE(sol.consistent);
}

TEST(SolveLambda, MirroredRootIsRejected) {
  std::mt19937_64 rng(2);
  const CameraRig rig;
  for (int i = 0; i < 100; ++i) {
    const Wall truth = testing::random_wall(rng);
    const WallRays rays = testing::wall_rays(rig, truth, 8);
    const auto nsp = null_space(build_wall_system(rays.ceiling, rays.floor),
                                Eigen::MatrixXd(), 2, NullSpaceMethod::kSvd);
    const LambdaSolution sol = solve_lambda(nsp);
    EXPECT_LE(std::abs(sol.lambda_v - sol.lambda_w), 1e-9);
    EXPECT_NEAR(sol.h_c, truth.h_c, 1e-9);
    EXPECT_NEAR(sol.h_f, truth.h_f, 1e-9);
    ASSERT_EQ(sol.candidates.size(), 2u);
    for (std::size_t k = 0; k < sol.candidates.size(); ++k) {
      if (k == sol.chosen) continue;
      EXPECT_LE(sol.candidates[k].h_c, sol.candidates[k].h_f);
    }
  }
}

TEST(SolveLambda, NeedsTwoBasisVectors) {
  NullSpaceParam nsp;
  nsp.basis = {Eigen::VectorXd::Ones(7)};
  EXPECT_THROW(solve_lambda(nsp), Error);
}

TEST(SolveWallOverdetermined, RecoversWall) {
  const CameraRig rig{0.5, 1024, 512};
  const Wall truth = testing::make_wall(kPi / 2.0, 2.0, 1.4, -1.6);
  ASSERT_LT((truth.frame.direction() - Vec2(0, 1)).norm(), 1e-15);
  for (auto method : {NullSpaceMethod::kNoiseCompensated, NullSpaceMethod::kSvd}) {
    SolverOptions opt;
    opt.method = method;
    const auto est = solve_wall_overdetermined(testing::wall_rays(rig, truth, 8), opt);
    EXPECT_NEAR(est.wall.d, 2.0, 1e-9);
    EXPECT_NEAR(est.wall.h_c, 1.4, 1e-9);
    EXPECT_NEAR(est.wall.h_f, -1.6, 1e-9);
    EXPECT_LT((est.wall.frame.direction() - Vec2(0, 1)).norm(), 1e-9);
    EXPECT_LE(est.diagnostics.max_residual, 1e-8);
    EXPECT_EQ(est.diagnostics.null_dimension >= 1, true);
  }
}

TEST(SolveWallOverdetermined, CentralRaysAreDegenerate) {
  const Wall truth = testing::make_wall(0.4, 2.0, 1.4, -1.6);
  WallRays rays;
  const Vec3 center(0.1, -0.2, 0.0);
  for (int k = 0; k < 8; ++k) {
    const Vec3 along = (k - 3.5) * 0.4 * truth.frame.e1 + truth.d * truth.frame.e2;
    rays.ceiling.push_back(ProjectingRay::from_origin(
        center, (along + truth.h_c * truth.frame.e3 - center).normalized()));
    rays.floor.push_back(ProjectingRay::from_origin(
        center, (along + truth.h_f * truth.frame.e3 - center).normalized()));
  }
  try {
    solve_wall_overdetermined(rays);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(SolveWallOverdetermined, DoublingAllLengthsDoublesTheSolution) {
  const Wall truth = testing::make_wall(2.1, 2.2, 1.3, -1.5);
  const Wall twice = testing::make_wall(2.1, 4.4, 2.6, -3.0);
  const auto a = solve_wall_overdetermined(testing::wall_rays(CameraRig{0.5, 1024, 512}, truth, 10));
  const auto b = solve_wall_overdetermined(testing::wall_rays(CameraRig{1.0, 1024, 512}, twice, 10));
  EXPECT_NEAR(b.wall.d, 2.0 * a.wall.d, 1e-9);
  EXPECT_NEAR(b.wall.h_c, 2.0 * a.wall.h_c, 1e-9);
  EXPECT_NEAR(b.wall.h_f, 2.0 * a.wall.h_f, 1e-9);
  EXPECT_LT((b.wall.frame.e1 - a.wall.frame.e1).norm(), 1e-9);
}

TEST(SolveWallOverdetermined, TooFewRays) {
  const WallRays rays = testing::wall_rays(CameraRig{}, testing::make_wall(0.0, 2.0, 1.0, -1.0), 2);
  EXPECT_THROW(solve_wall_overdetermined(rays), Error);
}

TEST(SolveWallMinimal, TrueWallAmongCandidates) {
  std::mt19937_64 rng(4);
  const CameraRig rig;
  for (int i = 0; i < 100; ++i) {
    const Wall truth = testing::random_wall(rng);
    const auto cols = testing::facing_columns(rig, truth);
    std::uniform_int_distribution<std::size_t> pick(0, cols.size() - 1);
    std::size_t a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
    while (std::abs(static_cast<long>(a) - static_cast<long>(b)) < 10) b = pick(rng);
    while (std::abs(static_cast<long>(c) - static_cast<long>(d)) < 10) d = pick(rng);
    const WallRays rays = testing::render_wall(rig, truth, {cols[a], cols[b]},
                                               {cols[c], cols[d]});
    const auto candidates = solve_wall_minimal(rays);
    EXPECT_LE(candidates.size(), 4u);
    double best = 1e300;
    for (const auto& cand : candidates) {
      best = std::min(best, testing::wall_distance(cand.wall, truth));
      EXPECT_GT(cand.wall.d, 0.0);
      EXPECT_EQ(cand.ceiling_above_floor, cand.wall.h_c > cand.wall.h_f);
    }
    EXPECT_LE(best, 1e-8) << "wall " << i;
  }
}

TEST(SolveWallMinimal, DuplicateRayIsDegenerate) {
  const CameraRig rig;
  const Wall truth = testing::make_wall(0.7, 2.0, 1.3, -1.4);
  const auto cols = testing::facing_columns(rig, truth);
  const WallRays rays = testing::render_wall(rig, truth, {cols[5], cols[5]},
                                             {cols[2], cols[40]});
  EXPECT_THROW(solve_wall_minimal(rays), Error);
}

TEST(SolveWallMinimal, NeedsExactlyTwoPlusTwo) {
  const WallRays rays = testing::wall_rays(CameraRig{}, testing::make_wall(0.0, 2.0, 1.0, -1.0), 3);
  EXPECT_THROW(solve_wall_minimal(rays), Error);
}

void expect_layout_matches(const LayoutSolution& sol, const Layout& room, double tol) {
  ASSERT_EQ(sol.walls.size(), room.wall_count());
  EXPECT_NEAR(sol.h_c, room.h_c, tol);
  EXPECT_NEAR(sol.h_f, room.h_f, tol);
  for (std::size_t i = 0; i < room.wall_count(); ++i) {
    const Wall truth = room.wall(i);
    EXPECT_NEAR(sol.walls[i].d, truth.d, tol) << "wall " << i;
    EXPECT_LT((sol.walls[i].frame.e1 - truth.frame.e1).norm(), tol) << "wall " << i;
    EXPECT_NEAR(sol.walls[i].h_c, room.h_c, tol);
    EXPECT_NEAR(sol.walls[i].h_f, room.h_f, tol);
  }
}

TEST(SolveManhattan, Square) {
  const Layout room = testing::square_room(2.0, 1.5, -1.5);
  const auto sol = solve_manhattan(testing::labelled_rays(room, CameraRig{}), {0, 1, 0, 1});
  expect_layout_matches(sol, room, 1e-9);
  EXPECT_EQ(sol.mode, Mode::kManhattan);
  EXPECT_LE(sol.diagnostics.max_residual, 1e-8);
}

TEST(SolveManhattan, RotatedSquare) {
  const Layout room = testing::square_room(2.0, 1.5, -1.5).rotated(kPi / 6.0);
  const auto sol = solve_manhattan(testing::labelled_rays(room, CameraRig{}), {0, 1, 0, 1});
  expect_layout_matches(sol, room, 1e-9);
  const Vec2 u = sol.manhattan_direction;
  const Vec2 ref = at_angle(30.0);
  EXPECT_LT(std::min(std::abs(cross2(u, ref)), std::abs(u.dot(ref))), 1e-9);
}

TEST(SolveManhattan, LShapedRoom) {
  const Layout room = testing::l_shaped_room();
  const auto sol = solve_manhattan(testing::labelled_rays(room, CameraRig{}), testing::classes_from_truth(room));
  expect_layout_matches(sol, room, 1e-8);
}

TEST(SolveManhattan, RejectsBadInput) {
  const Layout room = testing::square_room(2.0, 1.5, -1.5);
  const auto rays = testing::labelled_rays(room, CameraRig{});
  EXPECT_THROW(solve_manhattan(rays, {0, 1, 0}), Error);
  EXPECT_THROW(solve_manhattan({rays[0], rays[1], rays[2]}, {0, 1, 0}), Error);
}

TEST(SolveAtlanta, Hexagon) {
  const Layout room = testing::regular_room(6, 2.0, 1.5, -1.2, 0.2);
  const auto sol = solve_atlanta(testing::labelled_rays(room, CameraRig{}), testing::directions_from_truth(room));
  EXPECT_EQ(sol.mode, Mode::kAtlanta);
  expect_layout_matches(sol, room, 1e-9);
  for (const auto& w : sol.walls) EXPECT_NEAR(w.d, 2.0, 1e-9);
}

TEST(SolveAtlanta, AgreesWithManhattanOnManhattanScenes) {
  DatasetSpec spec;
  const CameraRig rig;
  for (std::size_t i = 0; i < 10; ++i) {
    const Layout room = generate_layout(spec, i);
    const auto rays = testing::labelled_rays(room, rig);
    const auto m = solve_manhattan(rays, testing::classes_from_truth(room));
    const auto a = solve_atlanta(rays, testing::directions_from_truth(room));
    EXPECT_NEAR(m.h_c, a.h_c, 1e-8);
    EXPECT_NEAR(m.h_f, a.h_f, 1e-8);
    for (std::size_t k = 0; k < room.wall_count(); ++k) {
      EXPECT_NEAR(m.walls[k].d, a.walls[k].d, 1e-8);
    }
  }
}

TEST(SolveAtlanta, DirectionPerturbationDegradesSmoothly) {
  const Layout room = testing::regular_room(6, 2.0, 1.5, -1.2, 0.2);
  const auto rays = testing::labelled_rays(room, CameraRig{});
  const auto truth = testing::directions_from_truth(room);
  double previous = 0.0;
  for (int step = 0; step <= 10; ++step) {
    const double delta = 0.05 * step * kPi / 180.0;
    std::vector<Vec2> dirs;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const double s = i % 2 == 0 ? delta : -delta;
      dirs.push_back(Eigen::Rotation2Dd(s) * truth[i]);
    }
    const auto sol = solve_atlanta(rays, dirs);
    double worst = 0.0;
    for (const auto& w : sol.walls) worst = std::max(worst, std::abs(w.d - 2.0) / 2.0);
    EXPECT_LE(worst, 0.02) << "perturbation step " << step;
    EXPECT_LE(std::abs(worst - previous), 0.005) << "jump at step " << step;
    previous = worst;
  }
}

TEST(DirectionClasses, AxisWalls) {
  const auto dc = estimate_direction_classes(
      {at_angle(0), at_angle(90), at_angle(180), at_angle(270)});
  EXPECT_LT((dc.u - Vec2(1, 0)).norm(), 1e-12);
  EXPECT_EQ(dc.classes, (std::vector<int>{0, 1, 0, 1}));
}

TEST(DirectionClasses, NearThirtyDegrees) {
  const auto dc = estimate_direction_classes({at_angle(29), at_angle(31), at_angle(121)});
  // Vector mean of the quadrupled angles 116, 124 and 484 degrees.
  Vec2 sum = Vec2::Zero();
  for (double deg : {116.0, 124.0, 484.0}) sum += at_angle(deg);
  const double mean_deg = std::atan2(sum.y(), sum.x()) * 180.0 / kPi / 4.0;
  EXPECT_NEAR(mean_deg, 30.0, 0.5);
  EXPECT_LT((dc.u - at_angle(mean_deg)).norm(), 1e-12);
  EXPECT_EQ(dc.classes, (std::vector<int>{0, 0, 1}));
  for (bool amb : dc.ambiguous) EXPECT_FALSE(amb);
}

TEST(DirectionClasses, AllParallel) {
  const auto dc = estimate_direction_classes({at_angle(10), at_angle(190), at_angle(10)});
  EXPECT_LT((dc.u - at_angle(10)).norm(), 1e-12);
  EXPECT_EQ(dc.classes, (std::vector<int>{0, 0, 0}));
}

TEST(DirectionClasses, FlagsWallsNearTheDiagonal) {
  const auto dc = estimate_direction_classes({at_angle(0), at_angle(90), at_angle(180),
                                              at_angle(43)},
                                             {4.0, 4.0, 4.0, 0.1});
  EXPECT_TRUE(dc.ambiguous[3]);
  EXPECT_FALSE(dc.ambiguous[0]);
  EXPECT_THROW(estimate_direction_classes({at_angle(0)}), Error);
}

TEST(Reconstruct, SquareRoundTrip) {
  const Layout room = testing::square_room(2.0, 1.5, -1.5);
  for (Mode mode : {Mode::kManhattan, Mode::kAtlanta}) {
    const auto sol = reconstruct_layout(render_boundaries(room, CameraRig{}), mode);
    EXPECT_GE(iou3d(sol.layout(), room), 0.999);
    EXPECT_EQ(sol.walls.size(), 4u);
    for (const auto& w : sol.walls) EXPECT_NEAR(w.d, 2.0, 1e-9);
  }
}

TEST(Reconstruct, EightWallAtlantaCorners) {
  DatasetSpec spec;
  spec.mode = Mode::kAtlanta;
  spec.walls_min = spec.walls_max = 8;
  for (std::size_t i = 0; i < 5; ++i) {
    const Layout room = generate_layout(spec, i);
    const auto sol = reconstruct_layout(render_boundaries(room, CameraRig{}), Mode::kAtlanta);
    const auto ce = corner_error(sol.layout(), room);
    for (double dist : ce.distances) EXPECT_LE(dist, 1e-6);
  }
}

TEST(Reconstruct, TwoCornersIsSegmentationError) {
  auto obs = render_boundaries(testing::square_room(2.0, 1.5, -1.5), CameraRig{});
  int kept = 0;
  for (double& p : obs.corner_prob) {
    if (p > 0.5 && ++kept > 2) p = 0.0;
  }
  try {
    reconstruct_layout(obs, Mode::kManhattan);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSegmentation);
  }
}

TEST(Reconstruct, LShapedRoomWithOcclusion) {
  const Layout room = testing::l_shaped_room();
  const auto sol = reconstruct_layout(render_boundaries(room, CameraRig{}), Mode::kManhattan);
  const auto ce = corner_error(sol.layout(), room);
  EXPECT_LE(ce.ce, 1e-8);
}

// Properties

TEST(SolverProperties, HomogeneityInRayScale) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> mag(0.1, 10.0);
  std::bernoulli_distribution neg(0.5);
  const auto rescale = [&](WallRays rays) {
    for (auto* line : {&rays.ceiling, &rays.floor}) {
      for (auto& r : *line) r = r.scaled(neg(rng) ? -mag(rng) : mag(rng));
    }
    return rays;
  };
  const CameraRig rig;
  for (int i = 0; i < 20; ++i) {
    const Wall truth = testing::random_wall(rng);
    const WallRays rays = testing::wall_rays(rig, truth, 8);
    const auto a = solve_wall_overdetermined(rays);
    const auto b = solve_wall_overdetermined(rescale(rays));
    EXPECT_LE(testing::wall_distance(a.wall, b.wall), 1e-12);
  }
  const Layout room = testing::l_shaped_room();
  auto rays = testing::labelled_rays(room, rig);
  const auto m1 = solve_manhattan(rays, testing::classes_from_truth(room));
  const auto a1 = solve_atlanta(rays, testing::directions_from_truth(room));
  for (auto& r : rays) r = rescale(r);
  const auto m2 = solve_manhattan(rays, testing::classes_from_truth(room));
  const auto a2 = solve_atlanta(rays, testing::directions_from_truth(room));
  for (std::size_t k = 0; k < room.wall_count(); ++k) {
    EXPECT_LE(testing::wall_distance(m1.walls[k], m2.walls[k]), 1e-12);
    EXPECT_LE(testing::wall_distance(a1.walls[k], a2.walls[k]), 1e-12);
  }
}

TEST(SolverProperties, SimilarityEquivariance) {
  DatasetSpec spec;
  for (Mode mode : {Mode::kManhattan, Mode::kAtlanta}) {
    spec.mode = mode;
    for (std::size_t i = 0; i < 5; ++i) {
      const Layout room = generate_layout(spec, i);
      const CameraRig rig;
      const auto base = reconstruct_layout(render_boundaries(room, rig), mode);
      for (double s : {0.5, 3.0}) {
        CameraRig scaled_rig = rig;
        scaled_rig.radius *= s;
        const auto sol = reconstruct_layout(render_boundaries(room.scaled(s), scaled_rig), mode);
        ASSERT_EQ(sol.walls.size(), base.walls.size());
        EXPECT_NEAR(sol.h_c, s * base.h_c, 1e-8 * s);
        EXPECT_NEAR(sol.h_f, s * base.h_f, 1e-8 * s);
        for (std::size_t k = 0; k < sol.walls.size(); ++k) {
          EXPECT_NEAR(sol.walls[k].d, s * base.walls[k].d, 1e-8 * s);
        }
        EXPECT_LE(corner_error(sol.layout(), base.layout().scaled(s)).ce, 1e-8 * s);
      }
      // Rotation by a whole number of columns keeps the sampling identical.
      const double alpha = 2.0 * kPi * 37.0 / rig.width;
      const auto rot = reconstruct_layout(render_boundaries(room.rotated(alpha), rig), mode);
      EXPECT_LE(corner_error(rot.layout(), base.layout().rotated(alpha)).ce, 1e-8);
      // An arbitrary rotation still lands on the rotated ground truth.
      const auto any = reconstruct_layout(render_boundaries(room.rotated(0.123), rig), mode);
      EXPECT_LE(corner_error(any.layout(), room.rotated(0.123)).ce, 1e-8);
    }
  }
}

TEST(SolverProperties, NoiseFreeExactnessAndResiduals) {
  DatasetSpec spec;
  for (Mode mode : {Mode::kManhattan, Mode::kAtlanta}) {
    spec.mode = mode;
    for (std::size_t i = 0; i < 20; ++i) {
      const Layout room = generate_layout(spec, i);
      const auto sol = reconstruct_layout(render_boundaries(room, CameraRig{}), mode);
      ASSERT_EQ(sol.walls.size(), room.wall_count());
      EXPECT_LE(sol.diagnostics.max_residual, 1e-8);
      EXPECT_NEAR(sol.h_c / room.h_c, 1.0, 1e-8);
      EXPECT_NEAR(sol.h_f / room.h_f, 1.0, 1e-8);
      const auto ce = corner_error(sol.layout(), room);
      for (std::size_t k = 0; k < room.wall_count(); ++k) {
        const Wall truth = room.wall((k + room.wall_count() - ce.shift) % room.wall_count());
        EXPECT_NEAR(sol.walls[k].d / truth.d, 1.0, 1e-8);
        EXPECT_LT((sol.walls[k].frame.e1 - truth.frame.e1).norm(), 1e-8);
      }
    }
  }
}

TEST(SolverProperties, MinimalSolverContainsOverdeterminedSolution) {
  std::mt19937_64 rng(12);
  const CameraRig rig;
  for (int i = 0; i < 50; ++i) {
    const Wall truth = testing::random_wall(rng);
    const WallRays rays = testing::wall_rays(rig, truth, 8);
    const auto over = solve_wall_overdetermined(rays);
    std::vector<int> idx = {0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(idx.begin(), idx.end(), rng);
    const WallRays subset{{rays.ceiling[idx[0]], rays.ceiling[idx[1]]},
                          {rays.floor[idx[2]], rays.floor[idx[3]]}};
    double best = 1e300;
    for (const auto& c : solve_wall_minimal(subset)) {
      best = std::min(best, testing::wall_distance(c.wall, over.wall));
    }
    EXPECT_LE(best, 1e-6);
  }
}

}  // namespace
}  // namespace ncpano
