#include "hcoseg/superpixels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hcoseg/color.hpp"

namespace hcoseg {

namespace {

struct Center {
  double l = 0, a = 0, b = 0, x = 0, y = 0;
};

// Connected components of equal-label pixels, 4-connectivity, discovered
// in row-major order so component ids are deterministic.
struct Components {
  std::vector<int> comp;        // per pixel
  std::vector<int> size;        // per component
  std::vector<int> cluster;     // original cluster label per component
};

Components find_components(const std::vector<int>& labels, int w, int h) {
  Components c;
  c.comp.assign(labels.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (c.comp[start] != -1) continue;
    int id = static_cast<int>(c.size.size());
    int lab = labels[start];
    c.size.push_back(0);
    c.cluster.push_back(lab);
    stack.assign(1, start);
    c.comp[start] = id;
    while (!stack.empty()) {
      std::size_t p = stack.back();
      stack.pop_back();
      ++c.size[id];
      int x = static_cast<int>(p % w);
      int y = static_cast<int>(p / w);
      const int dx[4] = {1, -1, 0, 0};
      const int dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        std::size_t q = static_cast<std::size_t>(ny) * w + nx;
        if (c.comp[q] == -1 && labels[q] == lab) {
          c.comp[q] = id;
          stack.push_back(q);
        }
      }
    }
  }
  return c;
}

}  // namespace

SuperpixelDecomposition superpixels(const Frame& frame,
                                    const SlicParams& params) {
  const int w = frame.width;
  const int h = frame.height;
  if (w < 16 || h < 16)
    raise(Errc::validation, "superpixel decomposition needs >= 16x16 frames");
  if (params.target_count < 1)
    raise(Errc::validation, "superpixel target must be >= 1");

  const std::size_t n_pixels = frame.pixel_count();
  std::vector<double> lab(n_pixels * 3);
  for (std::size_t p = 0; p < n_pixels; ++p) {
    const std::uint8_t* px = frame.pixels.data() + 3 * p;
    Lab v = rgb_to_lab(px[0], px[1], px[2]);
    lab[3 * p] = v.l;
    lab[3 * p + 1] = v.a;
    lab[3 * p + 2] = v.b;
  }

  // Grid seeding at cell centers.
  int target = std::min<long long>(params.target_count, n_pixels);
  double interval = std::sqrt(static_cast<double>(w) * h / target);
  int nx = std::max(1, static_cast<int>(std::lround(w / interval)));
  int ny = std::max(1, static_cast<int>(std::lround(h / interval)));
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      Center c;
      c.x = (gx + 0.5) * w / nx;
      c.y = (gy + 0.5) * h / ny;
      int sx = std::min(w - 1, static_cast<int>(c.x));
      int sy = std::min(h - 1, static_cast<int>(c.y));
      std::size_t p = static_cast<std::size_t>(sy) * w + sx;
      c.l = lab[3 * p];
      c.a = lab[3 * p + 1];
      c.b = lab[3 * p + 2];
      centers.push_back(c);
    }
  }
  const int k = static_cast<int>(centers.size());

  std::vector<int> labels(n_pixels, -1);
  std::vector<double> dist(n_pixels);
  // Spatial distances are scaled by compactness/interval, the usual SLIC
  // trade-off between color homogeneity and shape regularity.
  const double spatial_w =
      (params.compactness / interval) * (params.compactness / interval);

  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(dist.begin(), dist.end(),
              std::numeric_limits<double>::infinity());
    std::fill(labels.begin(), labels.end(), -1);

    for (int c = 0; c < k; ++c) {
      const Center& ct = centers[c];
      int x0 = std::max(0, static_cast<int>(std::floor(ct.x - interval)));
      int x1 = std::min(w - 1, static_cast<int>(std::ceil(ct.x + interval)));
      int y0 = std::max(0, static_cast<int>(std::floor(ct.y - interval)));
      int y1 = std::min(h - 1, static_cast<int>(std::ceil(ct.y + interval)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          std::size_t p = static_cast<std::size_t>(y) * w + x;
          double dl = lab[3 * p] - ct.l;
          double da = lab[3 * p + 1] - ct.a;
          double db = lab[3 * p + 2] - ct.b;
          double dx = x - ct.x;
          double dy = y - ct.y;
          double d = dl * dl + da * da + db * db +
                     spatial_w * (dx * dx + dy * dy);
          if (d < dist[p]) {  // ties keep the lower cluster id
            dist[p] = d;
            labels[p] = c;
          }
        }
      }
    }

    // Pixels outside every search window fall back to their grid cell.
    for (std::size_t p = 0; p < n_pixels; ++p) {
      if (labels[p] != -1) continue;
      int x = static_cast<int>(p % w);
      int y = static_cast<int>(p / w);
      int gx = std::min(nx - 1, x * nx / w);
      int gy = std::min(ny - 1, y * ny / h);
      labels[p] = gy * nx + gx;
    }

    // Recompute centers; pixel order is fixed, so sums are reproducible.
    std::vector<Center> acc(k);
    std::vector<long long> cnt(k, 0);
    for (std::size_t p = 0; p < n_pixels; ++p) {
      int c = labels[p];
      acc[c].l += lab[3 * p];
      acc[c].a += lab[3 * p + 1];
      acc[c].b += lab[3 * p + 2];
      acc[c].x += static_cast<double>(p % w);
      acc[c].y += static_cast<double>(p / w);
      ++cnt[c];
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] == 0) continue;  // empty cluster keeps its old center
      double inv = 1.0 / static_cast<double>(cnt[c]);
      centers[c] = Center{acc[c].l * inv, acc[c].a * inv, acc[c].b * inv,
                          acc[c].x * inv, acc[c].y * inv};
    }
  }

  // Connectivity: each cluster keeps its largest fragment; every other
  // fragment is absorbed by the largest touching surviving region.
  Components comps = find_components(labels, w, h);
  const int n_comps = static_cast<int>(comps.size.size());

  std::vector<int> keeper_of_cluster(k, -1);
  for (int c = 0; c < n_comps; ++c) {
    int cl = comps.cluster[c];
    int cur = keeper_of_cluster[cl];
    if (cur == -1 || comps.size[c] > comps.size[cur])
      keeper_of_cluster[cl] = c;
  }

  // group[c]: the surviving component this fragment now belongs to.
  std::vector<int> group(n_comps, -1);
  std::vector<int> group_size(n_comps, 0);
  for (int c = 0; c < n_comps; ++c) {
    if (keeper_of_cluster[comps.cluster[c]] == c) {
      group[c] = c;
      group_size[c] = comps.size[c];
    }
  }

  std::vector<std::vector<int>> adjacency(n_comps);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int c = comps.comp[static_cast<std::size_t>(y) * w + x];
      if (x + 1 < w) {
        int r = comps.comp[static_cast<std::size_t>(y) * w + x + 1];
        if (r != c) {
          adjacency[c].push_back(r);
          adjacency[r].push_back(c);
        }
      }
      if (y + 1 < h) {
        int d = comps.comp[static_cast<std::size_t>(y + 1) * w + x];
        if (d != c) {
          adjacency[c].push_back(d);
          adjacency[d].push_back(c);
        }
      }
    }
  }
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  bool progress = true;
  while (progress) {
    progress = false;
    for (int c = 0; c < n_comps; ++c) {
      if (group[c] != -1) continue;
      // Largest adjacent resolved group, ties toward the lower id.
      int best = -1;
      for (int nc : adjacency[c]) {
        int g = group[nc];
        if (g == -1) continue;
        if (best == -1 || group_size[g] > group_size[best] ||
            (group_size[g] == group_size[best] && g < best))
          best = g;
      }
      if (best != -1) {
        group[c] = best;
        group_size[best] += comps.size[c];
        progress = true;
      }
    }
  }

  // Compact final labels in order of first appearance (row-major).
  std::vector<int> final_id(n_comps, -1);
  int n_final = 0;
  std::vector<int> out_labels(n_pixels);
  for (std::size_t p = 0; p < n_pixels; ++p) {
    int g = group[comps.comp[p]];
    if (final_id[g] == -1) final_id[g] = n_final++;
    out_labels[p] = final_id[g];
  }

  SuperpixelDecomposition decomp;
  decomp.width = w;
  decomp.height = h;
  decomp.count = n_final;
  decomp.labels = std::move(out_labels);
  decomp.sizes.assign(n_final, 0);

  // Feature means, scaled to O(1): R,G,B/255, L/100, a/128, b/128,
  // H/360, S, V, x/width, y/height.
  std::vector<std::array<double, 11>> acc(
      n_final, std::array<double, 11>{});
  for (std::size_t p = 0; p < n_pixels; ++p) {
    int id = decomp.labels[p];
    ++decomp.sizes[id];
    const std::uint8_t* px = frame.pixels.data() + 3 * p;
    Hsv hsv = rgb_to_hsv(px[0], px[1], px[2]);
    auto& a = acc[id];
    a[0] += px[0] / 255.0;
    a[1] += px[1] / 255.0;
    a[2] += px[2] / 255.0;
    a[3] += lab[3 * p] / 100.0;
    a[4] += lab[3 * p + 1] / 128.0;
    a[5] += lab[3 * p + 2] / 128.0;
    a[6] += hsv.h / 360.0;
    a[7] += hsv.s;
    a[8] += hsv.v;
    a[9] += static_cast<double>(p % w) / w;
    a[10] += static_cast<double>(p / w) / h;
  }
  decomp.features.resize(n_final);
  for (int id = 0; id < n_final; ++id) {
    double inv = 1.0 / static_cast<double>(decomp.sizes[id]);
    for (int f = 0; f < 11; ++f) decomp.features[id][f] = acc[id][f] * inv;
  }
  return decomp;
}

}  // namespace hcoseg
