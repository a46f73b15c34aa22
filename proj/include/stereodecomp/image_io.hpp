#pragma once

#include <string>

#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// Binary PGM (P5). Values are mapped to [0, 1] by dividing by maxval on
// read; writes quantize to the given maxval (255 or 65535, 16-bit payloads
// big-endian per the format).
Grid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Grid& image, int maxval = 65535);

// Grayscale PFM ('Pf'): dims line, then a scale line whose sign encodes
// endianness (negative = little-endian), rows stored bottom-to-top as 32-bit
// floats. Non-finite values mark invalid pixels.
DisparityMap read_pfm(const std::string& path);
void write_pfm(const std::string& path, const DisparityMap& map, bool little_endian = true);

void write_mask_pgm(const std::string& path, const BoolMask& mask);

}  // namespace stereodecomp
