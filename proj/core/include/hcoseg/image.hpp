#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcoseg/error.hpp"

namespace hcoseg {

/// 8-bit RGB raster plus its temporal position in the source sequence.
struct Frame {
  int width = 0;
  int height = 0;
  int index = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

  Frame() = default;
  Frame(int w, int h, int idx = 0);

  const std::uint8_t* rgb(int x, int y) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::uint8_t* rgb(int x, int y) {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

/// Per-pixel score in [0,1]. Stored as doubles; serialized as 32-bit PFM.
struct ProbabilityMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major

  ProbabilityMap() = default;
  ProbabilityMap(int w, int h, double fill = 0.0);

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

/// Row-major boolean raster; true marks the primary object.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t foreground_count() const;
};

/// Ordered frames with indices exactly 0..L-1.
struct FrameSequence {
  std::string source_id;
  std::vector<Frame> frames;

  std::size_t length() const { return frames.size(); }
  // Throws Errc::validation when indices are not exactly 0..L-1 in order.
  void validate() const;
};

/// Bilinear resampling with the half-pixel center convention. Output values
/// stay inside [min(input), max(input)].
ProbabilityMap resize_bilinear(const ProbabilityMap& map, int out_w, int out_h);

/// Same convention applied per RGB channel, rounded to nearest.
Frame resize_bilinear(const Frame& frame, int out_w, int out_h);

}  // namespace hcoseg
