#pragma once

#include <string>

#include "hcoseg/image.hpp"

namespace hcoseg {

// All writers go through a temporary file in the destination directory and
// rename on success, so a failure never leaves a partial file under the
// final name.

Frame read_frame_png(const std::string& path, int index = 0);
void write_frame_png(const Frame& frame, const std::string& path);

// Masks are stored as 8-bit grayscale PNG with values 0 and 255. On read,
// any pixel with luminance >= 128 counts as foreground.
BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const BinaryMask& mask, const std::string& path);

// Probability maps use grayscale PFM: "Pf", dimensions, scale -1.0
// (little-endian), 32-bit floats, rows bottom-up. Reads reject values
// outside [0,1] (Errc::range) and malformed headers (Errc::format).
ProbabilityMap read_map_pfm(const std::string& path);
void write_map_pfm(const ProbabilityMap& map, const std::string& path);

}  // namespace hcoseg
