#pragma once

#include <array>
#include <ostream>
#include <span>
#include <vector>

#include "hcoseg/superpixels.hpp"

namespace hcoseg {

struct FlowParams {
  int knn_k = 15;      // neighborhood size for mutual reversibility
  double sigma = 15.0; // decay constant; weights vanish past rank sigma
};

/// Row-stochastic superpixel correspondence between two frames. Rows whose
/// superpixel has no reversible partner stay all-zero.
struct Flow {
  int rows = 0;
  int cols = 0;
  double sigma = 15.0;
  std::vector<double> weights;  // row-major rows x cols

  double at(int i, int j) const {
    return weights[static_cast<std::size_t>(i) * cols + j];
  }
  bool row_nonzero(int i) const;
};

/// Pre-normalization reversible weights between two feature sets.
/// Pairwise L1 distance over the 11-vectors; one-directional ranks are
/// 1-based with ties broken toward the smaller superpixel id; the mutual
/// rank k is the larger of the two ranks. Weight is exp(-2k/sigma) when
/// k <= min(knn_k, sigma) and 0 otherwise. Symmetric up to transposition.
std::vector<double> reversible_weights(
    std::span<const std::array<double, 11>> feat_u,
    std::span<const std::array<double, 11>> feat_v, const FlowParams& params);

/// Divides every nonzero row by its sum (in place); zero rows are kept.
void row_normalize(std::vector<double>& weights, int rows, int cols);

/// Row-normalized flow with rows indexing u's superpixels.
Flow build_flow(const SuperpixelDecomposition& u,
                const SuperpixelDecomposition& v, const FlowParams& params);

/// One "row col weight" triple per line, nonzero entries only.
void write_flow_text(const Flow& flow, std::ostream& out);

}  // namespace hcoseg
