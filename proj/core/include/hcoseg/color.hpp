#pragma once

#include <cstdint>

namespace hcoseg {

struct Lab {
  double l;  // [0, 100]
  double a;
  double b;
};

struct Hsv {
  double h;  // [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 1]
};

// CIE L*a*b* under the D65 white point with sRGB gamma decoding.
Lab rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Standard hexcone model; H is 0 whenever S is 0.
Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace hcoseg
