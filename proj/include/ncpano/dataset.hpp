#pragma once

#include <cstdint>
#include <vector>

#include "ncpano/layout.hpp"

namespace ncpano {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Parameters of a seeded synthetic room dataset. Every layout is a pure
// function of (seed, index).
struct DatasetSpec {
  std::size_t n_layouts = 650;
  int walls_min = 6;
  int walls_max = 10;
  Mode mode = Mode::kManhattan;
  std::uint64_t seed = 7;

  Interval ceiling_height{0.8, 1.6};   // above the camera plane
  Interval floor_height{-1.7, -1.1};   // signed, below the camera plane
  Interval room_extent{2.0, 4.5};      // bounding half-extent / vertex range

  double camera_radius = 0.5;
  double clearance = 0.2;
  // Smallest azimuth a wall may subtend at the camera, radians.
  double min_wall_span = 0.15;
  // Atlanta: smallest turn between adjacent walls, radians.
  double min_corner_turn = 0.2;
  // Camera placements per layout; pose 0 is the generated placement.
  int poses_per_layout = 4;
  // When false every wall is fully visible from the camera (camera inside
  // the footprint's kernel); non-convex rooms are still produced.
  bool allow_hidden_walls = false;
  int max_attempts = 2000;

  // Throws kInvalidArgument. Manhattan needs even wall counts >= 4, Atlanta
  // wall counts >= 3.
  void validate() const;
};

// Throws kGeneration when rejection sampling exhausts max_attempts.
Layout generate_layout(const DatasetSpec& spec, std::size_t index);

// The layout of `index` re-expressed around camera placement `pose`.
Layout generate_pose(const DatasetSpec& spec, std::size_t index, int pose);

std::vector<Layout> generate_dataset(const DatasetSpec& spec);

// True when some wall's supporting line has the camera origin on its
// exterior side, so that wall cannot be seen at all.
bool has_hidden_wall(const Layout& layout);

}  // namespace ncpano
