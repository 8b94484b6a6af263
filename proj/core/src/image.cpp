#include "hcoseg/image.hpp"

#include <algorithm>
#include <cmath>

namespace hcoseg {

namespace {

void check_dims(int w, int h) {
  if (w < 1 || h < 1)
    raise(Errc::validation, "raster dimensions must be at least 1x1");
}

// Half-pixel center convention: output center j maps to input coordinate
// (j + 0.5) * in / out - 0.5, clamped to the valid range.
struct Axis {
  int i0, i1;
  double t;
};

Axis map_axis(int j, int in, int out) {
  double x = (j + 0.5) * static_cast<double>(in) / out - 0.5;
  x = std::clamp(x, 0.0, static_cast<double>(in - 1));
  int i0 = static_cast<int>(x);
  int i1 = std::min(i0 + 1, in - 1);
  return {i0, i1, x - i0};
}

}  // namespace

Frame::Frame(int w, int h, int idx) : width(w), height(h), index(idx) {
  check_dims(w, h);
  pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

ProbabilityMap::ProbabilityMap(int w, int h, double fill)
    : width(w), height(h) {
  check_dims(w, h);
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
  check_dims(w, h);
  bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::foreground_count() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

void FrameSequence::validate() const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].index != static_cast<int>(i))
      raise(Errc::validation,
            "sequence '" + source_id + "': frame at position " +
                std::to_string(i) + " has index " +
                std::to_string(frames[i].index));
  }
}

ProbabilityMap resize_bilinear(const ProbabilityMap& map, int out_w,
                               int out_h) {
  check_dims(out_w, out_h);
  ProbabilityMap out(out_w, out_h);
  std::vector<Axis> xs(out_w);
  for (int x = 0; x < out_w; ++x) xs[x] = map_axis(x, map.width, out_w);
  for (int y = 0; y < out_h; ++y) {
    Axis ay = map_axis(y, map.height, out_h);
    for (int x = 0; x < out_w; ++x) {
      const Axis& ax = xs[x];
      double top = map.at(ax.i0, ay.i0) * (1.0 - ax.t) +
                   map.at(ax.i1, ay.i0) * ax.t;
      double bot = map.at(ax.i0, ay.i1) * (1.0 - ax.t) +
                   map.at(ax.i1, ay.i1) * ax.t;
      out.at(x, y) = top * (1.0 - ay.t) + bot * ay.t;
    }
  }
  return out;
}

Frame resize_bilinear(const Frame& frame, int out_w, int out_h) {
  check_dims(out_w, out_h);
  Frame out(out_w, out_h, frame.index);
  std::vector<Axis> xs(out_w);
  for (int x = 0; x < out_w; ++x) xs[x] = map_axis(x, frame.width, out_w);
  for (int y = 0; y < out_h; ++y) {
    Axis ay = map_axis(y, frame.height, out_h);
    for (int x = 0; x < out_w; ++x) {
      const Axis& ax = xs[x];
      const std::uint8_t* p00 = frame.rgb(ax.i0, ay.i0);
      const std::uint8_t* p10 = frame.rgb(ax.i1, ay.i0);
      const std::uint8_t* p01 = frame.rgb(ax.i0, ay.i1);
      const std::uint8_t* p11 = frame.rgb(ax.i1, ay.i1);
      std::uint8_t* dst = out.rgb(x, y);
      for (int c = 0; c < 3; ++c) {
        double top = p00[c] * (1.0 - ax.t) + p10[c] * ax.t;
        double bot = p01[c] * (1.0 - ax.t) + p11[c] * ax.t;
        double v = top * (1.0 - ay.t) + bot * ay.t;
        dst[c] = static_cast<std::uint8_t>(std::lround(v));
      }
    }
  }
  return out;
}

}  // namespace hcoseg
