#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hcoseg/image.hpp"
#include "hcoseg/slice_tree.hpp"

namespace hcoseg {

enum class BackendKind { baseline, external };

struct BackendConfig {
  BackendKind kind = BackendKind::baseline;
  int proc_width = 320;   // co-segmentation runs at this resolution
  int proc_height = 320;
  int color_bins = 12;    // quantization bins per RGB channel
  double border_fraction = 0.05;
  std::string external_dir;  // root of pair_<a>_<b>/{a,b}.pfm for kind external

  // Errc::validation on bins < 2 or border_fraction outside (0, 0.5).
  void validate() const;
};

/// The two directional outputs of one frame-pair co-segmentation:
/// map_a scores objects of A shared with B, map_b the reverse.
struct PairResult {
  ProbabilityMap map_a;
  ProbabilityMap map_b;
};

/// Deterministic color-commonness backend, evaluated at the input
/// resolution. For each frame: saliency = 1 - border-band background
/// likelihood of the pixel's quantized color, multiplied by the pair
/// commonness min(h_a, h_b) of that color, rescaled to peak at 1.
PairResult baseline_maps(const Frame& a, const Frame& b,
                         const BackendConfig& cfg);

/// Loads externally produced maps from
/// <external_dir>/pair_<lo>_<hi>/{a,b}.pfm (6-digit indices, lo < hi;
/// queries with swapped arguments swap the roles). Maps must be sized at
/// the frame's native resolution or the processing resolution and lie in
/// [0,1]; violations raise errors naming the pair.
PairResult external_maps(const Frame& a, const Frame& b,
                         const BackendConfig& cfg);

/// Backend dispatch. Baseline work happens at the processing resolution;
/// results come back bilinearly resized to each frame's native size.
PairResult coseg_pair(const Frame& a, const Frame& b,
                      const BackendConfig& cfg);

/// Per-pixel arithmetic mean of the given maps, summed in the order given.
/// Errc::validation on an empty span, Errc::dimension on mismatched sizes.
ProbabilityMap fuse_masks(std::span<const ProbabilityMap> maps);

struct InitializationResult {
  std::vector<ProbabilityMap> maps;    // one per frame, indexed by frame index
  std::size_t pair_evaluations = 0;    // co-segmentation calls performed
};

/// Runs co-segmentation across every sibling leaf pair of the tree and
/// fuses the directional results into one initial map per frame. Each
/// unordered frame pair is evaluated once; fusion folds contributions in
/// ascending partner order, so results do not depend on `workers`.
InitializationResult initialize_all(const FrameSequence& seq,
                                    const SliceTree& tree,
                                    const BackendConfig& cfg,
                                    unsigned workers = 1);

}  // namespace hcoseg
