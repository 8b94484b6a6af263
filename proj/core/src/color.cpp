#include "hcoseg/color.hpp"

#include <algorithm>
#include <cmath>

namespace hcoseg {

namespace {

inline double srgb_decode(std::uint8_t c8) {
  double c = c8 / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  constexpr double kDelta3 = kDelta * kDelta * kDelta;
  return t > kDelta3 ? std::cbrt(t)
                     : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

}  // namespace

Lab rgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  double r = srgb_decode(r8);
  double g = srgb_decode(g8);
  double b = srgb_decode(b8);

  // sRGB to XYZ, D65 reference white.
  double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  double fx = lab_f(x / 0.95047);
  double fy = lab_f(y / 1.0);
  double fz = lab_f(z / 1.08883);

  return Lab{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  double r = r8 / 255.0;
  double g = g8 / 255.0;
  double b = b8 / 255.0;
  double maxc = std::max({r, g, b});
  double minc = std::min({r, g, b});
  double delta = maxc - minc;

  Hsv out{0.0, 0.0, maxc};
  if (maxc > 0.0) out.s = delta / maxc;
  if (delta > 0.0) {
    double h;
    if (maxc == r)
      h = std::fmod((g - b) / delta, 6.0);
    else if (maxc == g)
      h = (b - r) / delta + 2.0;
    else
      h = (r - g) / delta + 4.0;
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
  }
  return out;
}

}  // namespace hcoseg
