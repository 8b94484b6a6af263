#include "hcoseg/refine.hpp"

#include <algorithm>
#include <cmath>

#include "hcoseg/parallel.hpp"

namespace hcoseg {

namespace {

void check_same_dims(const ProbabilityMap& map,
                     const SuperpixelDecomposition& decomp) {
  if (map.width != decomp.width || map.height != decomp.height)
    raise(Errc::dimension, "map and decomposition dimensions differ");
}

// F * x with a row-nonzero indicator, shared by propagate.
void flow_apply(const Flow& flow, std::span<const double> x,
                std::vector<double>& out, std::vector<char>& nonzero) {
  out.assign(flow.rows, 0.0);
  nonzero.assign(flow.rows, 0);
  for (int i = 0; i < flow.rows; ++i) {
    const double* row =
        flow.weights.data() + static_cast<std::size_t>(i) * flow.cols;
    double acc = 0.0;
    char any = 0;
    for (int j = 0; j < flow.cols; ++j) {
      if (row[j] != 0.0) {
        any = 1;
        acc += row[j] * x[j];
      }
    }
    out[i] = acc;
    nonzero[i] = any;
  }
}

}  // namespace

void RefinementParams::validate() const {
  if (lambda_p < 0.0 || lambda_s < 0.0)
    raise(Errc::validation, "lambda weights must be >= 0");
  if (!(threshold_ratio > 0.0) || !(threshold_ratio < 1.0))
    raise(Errc::validation, "threshold_ratio must lie in (0,1)");
  if (superpixel_target < 1)
    raise(Errc::validation, "superpixel_target must be >= 1");
  if (slic_iters < 1) raise(Errc::validation, "slic_iters must be >= 1");
  if (knn_k < 1) raise(Errc::validation, "knn_k must be >= 1");
}

std::vector<double> pixel_to_superpixel(
    const ProbabilityMap& map, const SuperpixelDecomposition& decomp) {
  check_same_dims(map, decomp);
  std::vector<double> sums(decomp.count, 0.0);
  for (std::size_t p = 0; p < map.values.size(); ++p)
    sums[decomp.labels[p]] += map.values[p];
  for (int i = 0; i < decomp.count; ++i)
    sums[i] /= static_cast<double>(decomp.sizes[i]);
  return sums;
}

ProbabilityMap project(const SuperpixelDecomposition& decomp,
                       std::span<const double> scores) {
  if (static_cast<int>(scores.size()) != decomp.count)
    raise(Errc::dimension, "score vector length must equal superpixel count");
  std::vector<double> clamped(scores.begin(), scores.end());
  for (double& v : clamped) v = std::clamp(v, 0.0, 1.0);
  ProbabilityMap map(decomp.width, decomp.height);
  for (std::size_t p = 0; p < map.values.size(); ++p)
    map.values[p] = clamped[decomp.labels[p]];
  return map;
}

BinaryMask adaptive_threshold(const ProbabilityMap& map, double ratio) {
  if (!(ratio > 0.0) || !(ratio < 1.0))
    raise(Errc::validation, "threshold ratio must lie in (0,1)");
  double peak = 0.0;
  for (double v : map.values) peak = std::max(peak, v);
  BinaryMask mask(map.width, map.height);
  if (peak <= 0.0) return mask;  // nothing to segment
  double cut = ratio * peak;
  for (std::size_t p = 0; p < map.values.size(); ++p)
    mask.bits[p] = map.values[p] >= cut ? 1 : 0;
  return mask;
}

std::vector<double> propagate(std::span<const double> x_cur,
                              const std::vector<double>* x_prev,
                              const Flow* flow_prev,
                              const std::vector<double>* x_next,
                              const Flow* flow_next,
                              const RefinementParams& params) {
  params.validate();
  if ((x_prev == nullptr) != (flow_prev == nullptr) ||
      (x_next == nullptr) != (flow_next == nullptr))
    raise(Errc::validation, "neighbor vector and flow must come together");

  const int n = static_cast<int>(x_cur.size());
  std::vector<double> prev_term, next_term;
  std::vector<char> prev_rows, next_rows;
  if (flow_prev) {
    if (flow_prev->rows != n ||
        flow_prev->cols != static_cast<int>(x_prev->size()))
      raise(Errc::dimension, "previous flow dimensions do not match scores");
    flow_apply(*flow_prev, *x_prev, prev_term, prev_rows);
  }
  if (flow_next) {
    if (flow_next->rows != n ||
        flow_next->cols != static_cast<int>(x_next->size()))
      raise(Errc::dimension, "subsequent flow dimensions do not match scores");
    flow_apply(*flow_next, *x_next, next_term, next_rows);
  }

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double numerator = x_cur[i];
    double denominator = 1.0;
    if (flow_prev && prev_rows[i]) {
      numerator += params.lambda_p * prev_term[i];
      denominator += params.lambda_p;
    }
    if (flow_next && next_rows[i]) {
      numerator += params.lambda_s * next_term[i];
      denominator += params.lambda_s;
    }
    out[i] = numerator / denominator;
  }
  return out;
}

RefinementResult refine_with_decompositions(
    std::span<const SuperpixelDecomposition> decomps,
    std::span<const int> order, std::span<const ProbabilityMap> initial,
    const RefinementParams& params, unsigned workers) {
  params.validate();
  if (order.empty()) raise(Errc::validation, "refinement needs >= 1 frame");
  for (int idx : order) {
    if (idx < 0 || idx >= static_cast<int>(decomps.size()) ||
        idx >= static_cast<int>(initial.size()))
      raise(Errc::validation, "refinement order references a missing frame");
  }

  const std::size_t n = order.size();
  RefinementResult result;
  result.maps.resize(n);
  result.masks.resize(n);

  if (n == 1) {  // no neighbors: the initial map passes through
    result.maps[0] = initial[order[0]];
    result.masks[0] = adaptive_threshold(result.maps[0],
                                         params.threshold_ratio);
    return result;
  }

  std::vector<std::vector<double>> scores(n);
  parallel_for(n, workers, [&](std::size_t k) {
    scores[k] = pixel_to_superpixel(initial[order[k]], decomps[order[k]]);
  });

  // One flow per temporally adjacent pair, in both row orientations.
  const FlowParams flow_params{params.knn_k, 15.0};
  std::vector<Flow> to_next(n - 1);  // rows: frame k, cols: frame k+1
  std::vector<Flow> to_prev(n - 1);  // rows: frame k+1, cols: frame k
  parallel_for(n - 1, workers, [&](std::size_t k) {
    const auto& u = decomps[order[k]];
    const auto& v = decomps[order[k + 1]];
    to_next[k] = build_flow(u, v, flow_params);
    to_prev[k] = build_flow(v, u, flow_params);
  });

  // Single simultaneous pass: every frame reads the pre-update scores.
  std::vector<std::vector<double>> updated(n);
  parallel_for(n, workers, [&](std::size_t k) {
    const std::vector<double>* prev = k > 0 ? &scores[k - 1] : nullptr;
    const Flow* f_prev = k > 0 ? &to_prev[k - 1] : nullptr;
    const std::vector<double>* next = k + 1 < n ? &scores[k + 1] : nullptr;
    const Flow* f_next = k + 1 < n ? &to_next[k] : nullptr;
    updated[k] = propagate(scores[k], prev, f_prev, next, f_next, params);
  });

  parallel_for(n, workers, [&](std::size_t k) {
    result.maps[k] = project(decomps[order[k]], updated[k]);
    result.masks[k] =
        adaptive_threshold(result.maps[k], params.threshold_ratio);
  });
  return result;
}

RefinementResult refine_sequence(const FrameSequence& seq,
                                 std::span<const ProbabilityMap> initial,
                                 const RefinementParams& params,
                                 unsigned workers) {
  params.validate();
  seq.validate();
  if (initial.size() != seq.length())
    raise(Errc::validation, "refinement needs one initial map per frame");
  for (std::size_t i = 0; i < seq.length(); ++i) {
    if (initial[i].width != seq.frames[i].width ||
        initial[i].height != seq.frames[i].height)
      raise(Errc::dimension,
            "initial map " + std::to_string(i) + " does not match its frame");
  }

  if (seq.length() == 1) {
    RefinementResult result;
    result.maps.push_back(initial[0]);
    result.masks.push_back(
        adaptive_threshold(initial[0], params.threshold_ratio));
    return result;
  }

  std::vector<SuperpixelDecomposition> decomps(seq.length());
  const SlicParams slic_params = params.slic();
  parallel_for(seq.length(), workers, [&](std::size_t i) {
    decomps[i] = superpixels(seq.frames[i], slic_params);
  });

  std::vector<int> order(seq.length());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return refine_with_decompositions(decomps, order, initial, params, workers);
}

}  // namespace hcoseg
