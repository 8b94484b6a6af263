#include "hcoseg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcoseg/error.hpp"

namespace hcoseg {

namespace {

double l1_distance(const std::array<double, 11>& a,
                   const std::array<double, 11>& b) {
  double d = 0.0;
  for (int f = 0; f < 11; ++f) d += std::abs(a[f] - b[f]);
  return d;
}

// 1-based ranks of the columns of one distance row, ascending distance,
// ties broken toward the smaller column id.
void rank_row(const double* dist, int n, std::vector<int>& order,
              std::vector<int>& rank_out) {
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (dist[lhs] != dist[rhs]) return dist[lhs] < dist[rhs];
    return lhs < rhs;
  });
  rank_out.resize(n);
  for (int pos = 0; pos < n; ++pos) rank_out[order[pos]] = pos + 1;
}

}  // namespace

bool Flow::row_nonzero(int i) const {
  const double* row = weights.data() + static_cast<std::size_t>(i) * cols;
  for (int j = 0; j < cols; ++j)
    if (row[j] != 0.0) return true;
  return false;
}

std::vector<double> reversible_weights(
    std::span<const std::array<double, 11>> feat_u,
    std::span<const std::array<double, 11>> feat_v, const FlowParams& params) {
  if (params.knn_k < 1)
    raise(Errc::validation, "knn_k must be >= 1");
  if (!(params.sigma > 0.0))
    raise(Errc::validation, "sigma must be > 0");

  const int nu = static_cast<int>(feat_u.size());
  const int nv = static_cast<int>(feat_v.size());
  std::vector<double> dist(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      dist[static_cast<std::size_t>(i) * nv + j] =
          l1_distance(feat_u[i], feat_v[j]);

  // Forward ranks: position of j among i's neighbors.
  std::vector<int> fwd_rank(dist.size());
  std::vector<int> order, rank_buf;
  for (int i = 0; i < nu; ++i) {
    rank_row(dist.data() + static_cast<std::size_t>(i) * nv, nv, order,
             rank_buf);
    std::copy(rank_buf.begin(), rank_buf.end(),
              fwd_rank.begin() + static_cast<std::size_t>(i) * nv);
  }

  // Backward ranks: position of i among j's neighbors.
  std::vector<int> bwd_rank(dist.size());
  std::vector<double> col(nu);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i)
      col[i] = dist[static_cast<std::size_t>(i) * nv + j];
    rank_row(col.data(), nu, order, rank_buf);
    for (int i = 0; i < nu; ++i)
      bwd_rank[static_cast<std::size_t>(i) * nv + j] = rank_buf[i];
  }

  const double cutoff = std::min<double>(params.knn_k, params.sigma);
  std::vector<double> weights(dist.size(), 0.0);
  for (std::size_t p = 0; p < weights.size(); ++p) {
    int mutual = std::max(fwd_rank[p], bwd_rank[p]);
    if (mutual <= cutoff)
      weights[p] = std::exp(-2.0 * mutual / params.sigma);
  }
  return weights;
}

void row_normalize(std::vector<double>& weights, int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    double* row = weights.data() + static_cast<std::size_t>(i) * cols;
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) sum += row[j];
    if (sum == 0.0) continue;
    for (int j = 0; j < cols; ++j) row[j] /= sum;
  }
}

Flow build_flow(const SuperpixelDecomposition& u,
                const SuperpixelDecomposition& v, const FlowParams& params) {
  if (u.width != v.width || u.height != v.height)
    raise(Errc::dimension,
          "flow endpoints must come from same-resolution frames");
  Flow flow;
  flow.rows = u.count;
  flow.cols = v.count;
  flow.sigma = params.sigma;
  flow.weights = reversible_weights(u.features, v.features, params);
  row_normalize(flow.weights, flow.rows, flow.cols);
  return flow;
}

void write_flow_text(const Flow& flow, std::ostream& out) {
  for (int i = 0; i < flow.rows; ++i)
    for (int j = 0; j < flow.cols; ++j)
      if (flow.at(i, j) != 0.0)
        out << i << ' ' << j << ' ' << flow.at(i, j) << '\n';
}

}  // namespace hcoseg
