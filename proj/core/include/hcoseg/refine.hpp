#pragma once

#include <span>
#include <vector>

#include "hcoseg/flow.hpp"
#include "hcoseg/image.hpp"
#include "hcoseg/superpixels.hpp"

namespace hcoseg {

struct RefinementParams {
  double lambda_p = 0.5;        // weight of the previous frame's term
  double lambda_s = 0.5;        // weight of the subsequent frame's term
  double threshold_ratio = 0.2; // binarization at ratio * per-frame max
  int superpixel_target = 400;
  double slic_compactness = 10.0;
  int slic_iters = 10;
  int knn_k = 15;

  // Errc::validation on negative lambdas or ratio outside (0,1).
  void validate() const;

  SlicParams slic() const {
    return SlicParams{superpixel_target, slic_compactness, slic_iters};
  }
};

/// Mean map value per superpixel. Errc::dimension on size mismatch.
std::vector<double> pixel_to_superpixel(const ProbabilityMap& map,
                                        const SuperpixelDecomposition& decomp);

/// Every pixel receives its superpixel's score, clamped to [0,1].
ProbabilityMap project(const SuperpixelDecomposition& decomp,
                       std::span<const double> scores);

/// Pixel is foreground iff value >= ratio * max over the map; an all-zero
/// map yields an all-false mask.
BinaryMask adaptive_threshold(const ProbabilityMap& map, double ratio);

/// One simultaneous update of the current frame's scores from its temporal
/// neighbors:
///   out = (x + lp * F_prev x_prev + ls * F_next x_next) / (1 + lp + ls)
/// Absent neighbors drop their term and their lambda from the denominator,
/// as does a neighbor whose flow row is all-zero for that superpixel.
/// Neighbor vectors are the pre-update ones, so per-frame updates commute.
std::vector<double> propagate(std::span<const double> x_cur,
                              const std::vector<double>* x_prev,
                              const Flow* flow_prev,
                              const std::vector<double>* x_next,
                              const Flow* flow_next,
                              const RefinementParams& params);

struct RefinementResult {
  std::vector<ProbabilityMap> maps;
  std::vector<BinaryMask> masks;
};

/// Full refinement over a temporally ordered sequence: one decomposition
/// per frame, flows between adjacent frames only, a single propagation
/// pass, projection back to pixels, then adaptive thresholding. A
/// single-frame sequence passes its initial map through untouched.
RefinementResult refine_sequence(const FrameSequence& seq,
                                 std::span<const ProbabilityMap> initial,
                                 const RefinementParams& params,
                                 unsigned workers = 1);

/// Same pass over precomputed decompositions; `order` selects and orders
/// the participating frames. Maps/masks are returned in `order`'s order.
/// Used for per-merge-level refinement up the slice tree.
RefinementResult refine_with_decompositions(
    std::span<const SuperpixelDecomposition> decomps,
    std::span<const int> order, std::span<const ProbabilityMap> initial,
    const RefinementParams& params, unsigned workers = 1);

}  // namespace hcoseg
