#include "hcoseg/dataset_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hcoseg {

namespace {

ProbabilityMap mask_to_map(const BinaryMask& mask) {
  ProbabilityMap map(mask.width, mask.height);
  for (std::size_t p = 0; p < map.values.size(); ++p)
    map.values[p] = mask.bits[p] ? 1.0 : 0.0;
  return map;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - out.mean) * (x - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

}  // namespace

std::string DatasetStats::mean_pm_std(double mean, double stddev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, stddev);
  return buf;
}

std::vector<int> sample_keyframes(int length, int stride) {
  if (length < 1) raise(Errc::validation, "length must be >= 1");
  if (stride < 1) raise(Errc::validation, "stride must be >= 1");
  std::vector<int> out;
  for (int i = 0; i < length; i += stride) out.push_back(i);
  return out;
}

ProbabilityMap average_annotation_map(std::span<const BinaryMask> masks,
                                      int out_w, int out_h) {
  if (masks.empty())
    raise(Errc::validation, "average annotation map needs >= 1 mask");

  ProbabilityMap acc(out_w, out_h);
  for (const BinaryMask& mask : masks) {
    ProbabilityMap resized = resize_bilinear(mask_to_map(mask), out_w, out_h);
    for (std::size_t p = 0; p < acc.values.size(); ++p)
      acc.values[p] += resized.values[p];
  }
  double inv = 1.0 / static_cast<double>(masks.size());
  double peak = 0.0;
  for (double& v : acc.values) {
    v *= inv;
    peak = std::max(peak, v);
  }
  if (peak > 0.0)
    for (double& v : acc.values) v /= peak;
  return acc;
}

int count_objects(const BinaryMask& mask) {
  std::vector<char> seen(mask.bits.size(), 0);
  std::vector<std::size_t> stack;
  const int w = mask.width;
  const int h = mask.height;
  int components = 0;
  for (std::size_t start = 0; start < mask.bits.size(); ++start) {
    if (!mask.bits[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    stack.assign(1, start);
    while (!stack.empty()) {
      std::size_t p = stack.back();
      stack.pop_back();
      int x = static_cast<int>(p % w);
      int y = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx = x + dx, ny = y + dy;
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (mask.bits[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
  }
  return components;
}

double area_fraction(const BinaryMask& mask) {
  return 100.0 * static_cast<double>(mask.foreground_count()) /
         static_cast<double>(mask.bits.size());
}

DatasetStats aggregate_stats(std::span<const MaskRecord> records) {
  if (records.empty())
    raise(Errc::validation, "no annotated masks found");
  std::vector<double> objects, areas;
  objects.reserve(records.size());
  areas.reserve(records.size());
  for (const MaskRecord& r : records) {
    objects.push_back(static_cast<double>(r.objects));
    areas.push_back(r.area_pct);
  }
  MeanStd o = mean_std(objects);
  MeanStd a = mean_std(areas);
  DatasetStats stats;
  stats.avg_objects = o.mean;
  stats.std_objects = o.stddev;
  stats.avg_area = a.mean;
  stats.std_area = a.stddev;
  stats.annotated = records.size();
  return stats;
}

}  // namespace hcoseg
