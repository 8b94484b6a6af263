#pragma once

#include <span>
#include <string>
#include <vector>

#include "hcoseg/image.hpp"

namespace hcoseg {

struct MaskRecord {
  std::string video;
  long long frame = -1;
  int objects = 0;
  double area_pct = 0.0;
};

struct DatasetStats {
  double avg_objects = 0.0;
  double std_objects = 0.0;  // population standard deviation
  double avg_area = 0.0;     // percent of frame area
  double std_area = 0.0;
  std::size_t annotated = 0;

  // "1.27 ± 0.36" style used throughout the stats report.
  static std::string mean_pm_std(double mean, double stddev);
};

/// Keyframe indices 0, stride, 2*stride, ... below length.
/// Errc::validation on stride < 1 or length < 1.
std::vector<int> sample_keyframes(int length, int stride);

/// Resizes every mask bilinearly (on its 0/1 values) to out_w x out_h,
/// averages, and divides by the global maximum so the peak is exactly 1.
/// All-empty inputs yield a zero map. Errc::validation on an empty list.
ProbabilityMap average_annotation_map(std::span<const BinaryMask> masks,
                                      int out_w, int out_h);

/// Number of 8-connected foreground components.
int count_objects(const BinaryMask& mask);

/// 100 * foreground pixels / total pixels.
double area_fraction(const BinaryMask& mask);

/// Population mean/stddev of object counts and area fractions over the
/// given per-mask records. Errc::validation when empty.
DatasetStats aggregate_stats(std::span<const MaskRecord> records);

}  // namespace hcoseg
