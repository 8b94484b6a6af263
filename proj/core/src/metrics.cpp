#include "hcoseg/metrics.hpp"

#include <algorithm>

#include "hcoseg/refine.hpp"

namespace hcoseg {

namespace {

struct Overlap {
  std::size_t inter = 0;
  std::size_t pred = 0;
  std::size_t gt = 0;
};

Overlap overlap(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.width != gt.width || pred.height != gt.height)
    raise(Errc::dimension, "mask dimensions differ");
  Overlap o;
  for (std::size_t p = 0; p < pred.bits.size(); ++p) {
    o.pred += pred.bits[p];
    o.gt += gt.bits[p];
    o.inter += pred.bits[p] & gt.bits[p];
  }
  return o;
}

}  // namespace

void EvalConfig::validate() const {
  if (!(binarization_ratio > 0.0) || !(binarization_ratio < 1.0))
    raise(Errc::validation, "binarization_ratio must lie in (0,1)");
  if (!(f_beta_sq > 0.0)) raise(Errc::validation, "f_beta_sq must be > 0");
  if (keyframe_stride < 1)
    raise(Errc::validation, "keyframe_stride must be >= 1");
}

double frame_iou(const BinaryMask& pred, const BinaryMask& gt) {
  Overlap o = overlap(pred, gt);
  std::size_t uni = o.pred + o.gt - o.inter;
  if (uni == 0) return 1.0;  // both empty
  return static_cast<double>(o.inter) / static_cast<double>(uni);
}

double frame_f(const BinaryMask& pred, const BinaryMask& gt, double beta_sq) {
  Overlap o = overlap(pred, gt);
  if (o.pred == 0 && o.gt == 0) return 1.0;
  if (o.inter == 0) return 0.0;
  double precision = static_cast<double>(o.inter) / o.pred;
  double recall = static_cast<double>(o.inter) / o.gt;
  return (1.0 + beta_sq) * precision * recall /
         (beta_sq * precision + recall);
}

DatasetScores dataset_scores(std::span<const EvalRecord> records) {
  if (records.empty())
    raise(Errc::validation, "no records to score");

  DatasetScores out;
  // Group by video in first-appearance order; means are order-invariant.
  for (const EvalRecord& r : records) {
    auto it = std::find_if(out.per_video.begin(), out.per_video.end(),
                           [&](const VideoScore& v) {
                             return v.video == r.video;
                           });
    if (it == out.per_video.end()) {
      out.per_video.push_back(VideoScore{r.video, 0, 0.0, 0.0});
      it = out.per_video.end() - 1;
    }
    it->frames += 1;
    it->miou += r.iou;
    it->mf += r.f;
  }
  for (VideoScore& v : out.per_video) {
    v.miou /= static_cast<double>(v.frames);
    v.mf /= static_cast<double>(v.frames);
    out.miou += v.miou;
    out.mf += v.mf;
  }
  out.miou /= static_cast<double>(out.per_video.size());
  out.mf /= static_cast<double>(out.per_video.size());
  return out;
}

BinaryMask binarize_for_eval(const ProbabilityMap& map, double ratio) {
  return adaptive_threshold(map, ratio);
}

}  // namespace hcoseg
