#pragma once

#include <span>
#include <string>
#include <vector>

#include "hcoseg/image.hpp"

namespace hcoseg {

struct EvalConfig {
  double binarization_ratio = 0.2;  // fraction of the per-map maximum
  double f_beta_sq = 0.3;
  int keyframe_stride = 15;  // only annotated keyframes are evaluated

  // Errc::validation on ratio outside (0,1) or beta^2 <= 0.
  void validate() const;
};

struct EvalRecord {
  std::string video;
  long long frame = -1;
  double iou = 0.0;
  double f = 0.0;
};

/// Intersection over union. Both masks empty -> 1.0; exactly one empty ->
/// 0.0. Errc::dimension on size mismatch.
double frame_iou(const BinaryMask& pred, const BinaryMask& gt);

/// F_beta on binary masks: (1+b2)*P*R / (b2*P + R), 0 when undefined,
/// 1.0 when both masks are empty.
double frame_f(const BinaryMask& pred, const BinaryMask& gt, double beta_sq);

struct VideoScore {
  std::string video;
  std::size_t frames = 0;
  double miou = 0.0;
  double mf = 0.0;
};

struct DatasetScores {
  double miou = 0.0;
  double mf = 0.0;
  std::vector<VideoScore> per_video;
};

/// Step-wise averaging: frame scores are averaged within each video first,
/// then the per-video means are averaged with equal weight.
/// Errc::validation on an empty record set.
DatasetScores dataset_scores(std::span<const EvalRecord> records);

/// Thresholds at ratio * per-map maximum, the same rule used by refinement.
BinaryMask binarize_for_eval(const ProbabilityMap& map, double ratio);

}  // namespace hcoseg
