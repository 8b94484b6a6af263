#pragma once

#include <array>
#include <vector>

#include "hcoseg/image.hpp"

namespace hcoseg {

struct SlicParams {
  int target_count = 400;
  double compactness = 10.0;
  int iterations = 10;
};

/// Partition of a frame into contiguous labeled regions. Each region
/// carries an 11-dim feature vector of means scaled to O(1) ranges:
///   R/255, G/255, B/255, L/100, a/128, b/128, H/360, S, V, x/width, y/height.
struct SuperpixelDecomposition {
  int width = 0;
  int height = 0;
  int count = 0;                  // number of superpixels
  std::vector<int> labels;        // per pixel, 0..count-1
  std::vector<std::array<double, 11>> features;
  std::vector<int> sizes;         // pixel count per superpixel

  int label_at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

/// SLIC-style decomposition: grid-seeded k-means in (Lab, x, y) with
/// compactness weighting and a fixed iteration count, followed by a
/// connectivity pass that absorbs each orphaned fragment into the largest
/// touching region. Fully deterministic. Errc::validation below 16x16.
SuperpixelDecomposition superpixels(const Frame& frame,
                                    const SlicParams& params);

}  // namespace hcoseg
