#pragma once

#include <cstdint>

#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// Dense matching scores over disparity hypotheses at the reference level.
// Entry (r, c, d) holds the cross-correlation of the left feature vector at
// (r, c) with the right feature vector at (r, c - d). Hypotheses whose warp
// target falls outside the frame (c - d < 0) are invalid and carry -inf.
struct CostVolume {
  int height = 0;
  int width = 0;
  int disparities = 0;
  std::vector<double> scores;  // (r * width + c) * disparities + d
  std::uint64_t score_evaluations = 0;  // dot products computed to fill it

  CostVolume() = default;
  CostVolume(int height, int width, int disparities);

  double at(int r, int c, int d) const { return scores[index(r, c, d)]; }
  double& at(int r, int c, int d) { return scores[index(r, c, d)]; }
  bool valid(int /*r*/, int c, int d) const { return c - d >= 0; }
  std::size_t index(int r, int c, int d) const {
    return (static_cast<std::size_t>(r) * width + c) * disparities + d;
  }
  // Number of in-frame hypotheses, i.e. sum over columns of min(D, c+1).
  std::uint64_t valid_count() const;
};

CostVolume build_cost_volume(const Grid& left, const Grid& right, int disparities);

// Per-disparity-slice box filter averaging valid neighbors within the
// (2*radius+1)^2 window. Validity is unchanged; radius 0 is the identity.
CostVolume aggregate_costs(const CostVolume& cv, int radius);

struct Regression {
  DisparityMap disparity;
  Grid variance;  // channels == 1
};

// Softmax over the valid hypotheses of each pixel (max-subtracted), then
// disparity as the expectation and variance as the spread around it.
Regression softargmax_regress(const CostVolume& cv);

}  // namespace stereodecomp
