#include "hcoseg/coseg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "hcoseg/image_io.hpp"
#include "hcoseg/parallel.hpp"

namespace hcoseg {

namespace {

namespace fs = std::filesystem;

std::string zero6(int v) {
  std::ostringstream out;
  out << std::setw(6) << std::setfill('0') << v;
  return out.str();
}

std::string pair_tag(const Frame& a, const Frame& b) {
  return "(" + std::to_string(a.index) + ", " + std::to_string(b.index) + ")";
}

struct Histograms {
  std::vector<double> whole;    // normalized over all pixels
  std::vector<double> border;   // raw counts over the border band
  double border_max = 0.0;
  std::vector<int> bins;        // per-pixel bin index
};

Histograms frame_histograms(const Frame& f, const BackendConfig& cfg) {
  const int q = cfg.color_bins;
  Histograms h;
  h.whole.assign(static_cast<std::size_t>(q) * q * q, 0.0);
  h.border.assign(h.whole.size(), 0.0);
  h.bins.resize(f.pixel_count());

  int band = std::max(
      1, static_cast<int>(std::lround(cfg.border_fraction *
                                      std::min(f.width, f.height))));
  for (int y = 0; y < f.height; ++y) {
    bool y_border = y < band || y >= f.height - band;
    for (int x = 0; x < f.width; ++x) {
      const std::uint8_t* px = f.rgb(x, y);
      int bin = (px[0] * q / 256) * q * q + (px[1] * q / 256) * q +
                (px[2] * q / 256);
      h.bins[static_cast<std::size_t>(y) * f.width + x] = bin;
      h.whole[bin] += 1.0;
      if (y_border || x < band || x >= f.width - band) h.border[bin] += 1.0;
    }
  }
  double total = static_cast<double>(f.pixel_count());
  for (double& v : h.whole) v /= total;
  h.border_max = *std::max_element(h.border.begin(), h.border.end());
  return h;
}

ProbabilityMap commonness_saliency_map(const Frame& f, const Histograms& own,
                                       const std::vector<double>& commonness) {
  ProbabilityMap map(f.width, f.height);
  for (std::size_t p = 0; p < map.values.size(); ++p) {
    int bin = own.bins[p];
    double bg = own.border[bin] / own.border_max;
    map.values[p] = (1.0 - bg) * commonness[bin];
  }
  return map;
}

ProbabilityMap resize_to(const ProbabilityMap& map, int w, int h) {
  if (map.width == w && map.height == h) return map;
  return resize_bilinear(map, w, h);
}

ProbabilityMap load_external_map(const fs::path& file, const Frame& frame,
                                 const BackendConfig& cfg,
                                 const std::string& tag) {
  if (!fs::exists(file))
    raise(Errc::io, "coseg pair " + tag + ": missing map file " +
                        file.string());
  ProbabilityMap map;
  try {
    map = read_map_pfm(file.string());
  } catch (const Error& e) {
    throw Error(e.code(), "coseg pair " + tag + ": " + e.what());
  }
  bool native = map.width == frame.width && map.height == frame.height;
  bool processing =
      map.width == cfg.proc_width && map.height == cfg.proc_height;
  if (!native && !processing)
    raise(Errc::dimension,
          "coseg pair " + tag + ": map " + file.string() + " is " +
              std::to_string(map.width) + "x" + std::to_string(map.height) +
              ", expected " + std::to_string(frame.width) + "x" +
              std::to_string(frame.height) + " or " +
              std::to_string(cfg.proc_width) + "x" +
              std::to_string(cfg.proc_height));
  return resize_to(map, frame.width, frame.height);
}

}  // namespace

void BackendConfig::validate() const {
  if (color_bins < 2)
    raise(Errc::validation, "color_bins must be >= 2");
  if (!(border_fraction > 0.0) || !(border_fraction < 0.5))
    raise(Errc::validation, "border_fraction must lie in (0, 0.5)");
  if (proc_width < 1 || proc_height < 1)
    raise(Errc::validation, "processing resolution must be >= 1x1");
  if (kind == BackendKind::external && external_dir.empty())
    raise(Errc::validation, "external backend requires external_dir");
}

PairResult baseline_maps(const Frame& a, const Frame& b,
                         const BackendConfig& cfg) {
  if (cfg.color_bins < 2)
    raise(Errc::validation, "color_bins must be >= 2");
  if (!(cfg.border_fraction > 0.0) || !(cfg.border_fraction < 0.5))
    raise(Errc::validation, "border_fraction must lie in (0, 0.5)");
  Histograms ha = frame_histograms(a, cfg);
  Histograms hb = frame_histograms(b, cfg);

  // Commonness of a quantized color: the smaller of the two frame
  // frequencies, rescaled so the strongest shared color scores 1.
  std::vector<double> commonness(ha.whole.size());
  double peak = 0.0;
  for (std::size_t bin = 0; bin < commonness.size(); ++bin) {
    commonness[bin] = std::min(ha.whole[bin], hb.whole[bin]);
    peak = std::max(peak, commonness[bin]);
  }
  if (peak > 0.0)
    for (double& v : commonness) v /= peak;

  return PairResult{commonness_saliency_map(a, ha, commonness),
                    commonness_saliency_map(b, hb, commonness)};
}

PairResult external_maps(const Frame& a, const Frame& b,
                         const BackendConfig& cfg) {
  if (cfg.external_dir.empty())
    raise(Errc::validation, "external backend requires external_dir");
  const std::string tag = pair_tag(a, b);
  int lo = std::min(a.index, b.index);
  int hi = std::max(a.index, b.index);
  fs::path dir =
      fs::path(cfg.external_dir) / ("pair_" + zero6(lo) + "_" + zero6(hi));

  bool a_is_lo = a.index <= b.index;
  ProbabilityMap for_a =
      load_external_map(dir / (a_is_lo ? "a.pfm" : "b.pfm"), a, cfg, tag);
  ProbabilityMap for_b =
      load_external_map(dir / (a_is_lo ? "b.pfm" : "a.pfm"), b, cfg, tag);
  return PairResult{std::move(for_a), std::move(for_b)};
}

PairResult coseg_pair(const Frame& a, const Frame& b,
                      const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::external) return external_maps(a, b, cfg);

  Frame scaled_a, scaled_b;
  const Frame* pa = &a;
  const Frame* pb = &b;
  if (a.width != cfg.proc_width || a.height != cfg.proc_height) {
    scaled_a = resize_bilinear(a, cfg.proc_width, cfg.proc_height);
    pa = &scaled_a;
  }
  if (b.width != cfg.proc_width || b.height != cfg.proc_height) {
    scaled_b = resize_bilinear(b, cfg.proc_width, cfg.proc_height);
    pb = &scaled_b;
  }
  PairResult res = baseline_maps(*pa, *pb, cfg);
  return PairResult{resize_to(res.map_a, a.width, a.height),
                    resize_to(res.map_b, b.width, b.height)};
}

ProbabilityMap fuse_masks(std::span<const ProbabilityMap> maps) {
  if (maps.empty())
    raise(Errc::validation, "fusion needs at least one map");
  const int w = maps.front().width;
  const int h = maps.front().height;
  ProbabilityMap out(w, h);
  for (const ProbabilityMap& m : maps) {
    if (m.width != w || m.height != h)
      raise(Errc::dimension, "fusion inputs must share dimensions");
    for (std::size_t p = 0; p < out.values.size(); ++p)
      out.values[p] += m.values[p];
  }
  double inv = 1.0 / static_cast<double>(maps.size());
  for (double& v : out.values) v *= inv;
  return out;
}

InitializationResult initialize_all(const FrameSequence& seq,
                                    const SliceTree& tree,
                                    const BackendConfig& cfg,
                                    unsigned workers) {
  cfg.validate();
  seq.validate();
  if (tree.length != static_cast<int>(seq.length()))
    raise(Errc::dimension, "tree was built for a different sequence length");

  // Unordered frame pairs in deterministic order: sibling pair by sibling
  // pair, first leaf's frames outermost, partner frames ascending. For any
  // fixed frame its partners then appear in ascending index order, so the
  // serial fold below matches the contract of fuse_masks.
  std::vector<std::pair<int, int>> items;
  for (auto [la, lb] : sibling_pairs(tree))
    for (int ai : tree.leaves[la])
      for (int bi : tree.leaves[lb]) items.emplace_back(ai, bi);

  InitializationResult result;
  result.pair_evaluations = items.size();
  std::vector<ProbabilityMap> sums(seq.length());
  std::vector<std::size_t> counts(seq.length(), 0);
  for (std::size_t i = 0; i < seq.length(); ++i)
    sums[i] = ProbabilityMap(seq.frames[i].width, seq.frames[i].height);

  auto accumulate = [](ProbabilityMap& sum, const ProbabilityMap& m) {
    if (m.width != sum.width || m.height != sum.height)
      raise(Errc::dimension, "backend map does not match frame dimensions");
    for (std::size_t p = 0; p < sum.values.size(); ++p)
      sum.values[p] += m.values[p];
  };

  // Chunked evaluation bounds memory while keeping the fold order fixed.
  const std::size_t chunk =
      std::max<std::size_t>(16, static_cast<std::size_t>(workers) * 4);
  std::vector<PairResult> slot(std::min(chunk, items.size()));
  for (std::size_t base = 0; base < items.size(); base += chunk) {
    std::size_t n = std::min(chunk, items.size() - base);
    parallel_for(n, workers, [&](std::size_t k) {
      auto [ai, bi] = items[base + k];
      slot[k] = coseg_pair(seq.frames[ai], seq.frames[bi], cfg);
    });
    for (std::size_t k = 0; k < n; ++k) {
      auto [ai, bi] = items[base + k];
      accumulate(sums[ai], slot[k].map_a);
      accumulate(sums[bi], slot[k].map_b);
      ++counts[ai];
      ++counts[bi];
      slot[k] = PairResult{};
    }
  }

  result.maps.resize(seq.length());
  for (std::size_t i = 0; i < seq.length(); ++i) {
    if (counts[i] == 0)
      raise(Errc::validation,
            "frame " + std::to_string(i) + " received no co-segmentation");
    double inv = 1.0 / static_cast<double>(counts[i]);
    for (double& v : sums[i].values) v *= inv;
    result.maps[i] = std::move(sums[i]);
  }
  return result;
}

}  // namespace hcoseg
