#pragma once

// Procedural test images with ground truth and seeds.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ffp/edge_features.hpp"
#include "ffp/fmm.hpp"

namespace ffp {

struct Fixture {
  ImageBuffer image;
  Field<std::uint8_t> truth;
  std::vector<SeedSet> seeds;
  std::size_t n_th = 0;  // structure area

  SeedSets seed_sets() const { return SeedSets(seeds, image.grid()); }
};

/// White disk on black. Set 1: plus-shaped 5 pixels at the centre; set 2: the same
/// shape near the top-left corner.
Fixture disk_fixture(int size = 128, double radius = 40.0);

/// Bright horizontal bar on a dark background, one seed set at the left end.
Fixture bar_fixture(int width = 128, int height = 64, int bar_width = 6);

/// Bright Archimedean spiral tube, seeded at its outer end.
Fixture spiral_fixture(int size = 128, double half_width = 3.0);

}  // namespace ffp
