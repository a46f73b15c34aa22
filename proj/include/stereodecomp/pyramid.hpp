#pragma once

#include <vector>

#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// Geometry of the level stack. Level 0 is the reference resolution where
// dense matching runs; level `levels` is the (padded) input resolution.
struct PyramidConfig {
  int levels = 3;            // L; the stack has levels+1 entries
  int scale = 2;             // s, integer ratio between adjacent levels
  int reference_height = 0;  // H0, set by fit_input
  int reference_width = 0;   // W0
  int reference_disparities = 0;  // D0; level l searches D0 * s^l hypotheses
  int feature_channels = 11;      // 1 intensity + 2 gradients + 8 census

  int level_height(int l) const;
  int level_width(int l) const;
  int level_disparities(int l) const;
  // s^k with overflow-free small exponents.
  static int ipow(int base, int exp);
  void validate() const;
};

// fit_input output: luminance image padded to an exact multiple of s^L,
// plus the original dimensions so final maps can be cropped back.
struct FittedImage {
  Grid image;  // single channel
  int original_height = 0;
  int original_width = 0;
};

// Converts a 1- or 3-channel image to single-channel luminance and
// edge-replicates on the right/bottom until both dimensions are multiples
// of scale^levels. Updates config.reference_height/width.
FittedImage fit_input(const Grid& image, PyramidConfig& config);

// Per-level feature grids, level 0 (coarsest) first.
// Channel 0: locally normalized intensity (9x9 window, eps in the variance).
// Channels 1-2: horizontal/vertical central-difference gradients.
// Channels 3+: census comparisons (+1/-1, ties 0) over the 3x3 neighborhood.
std::vector<Grid> extract_features(const FittedImage& fitted, const PyramidConfig& config);

// One s x s area-average reduction.
Grid area_downsample(const Grid& g, int scale);

// Corner-aligned bilinear upsampling by an integer factor, per channel.
Grid upsample_features(const Grid& g, int scale);

}  // namespace stereodecomp
