#pragma once

#include <map>
#include <string>
#include <vector>

#include "stereodecomp/detail_detect.hpp"
#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// Disparity error statistics over one pixel region.
struct EvalResult {
  double epe = 0.0;                       // mean absolute error
  std::map<double, double> bad;           // threshold -> outlier fraction
  double d1 = 0.0;                        // > 3 px and > 5% of ground truth
  double rms = 0.0;
  std::map<int, double> quantiles;        // percent -> nearest-rank |error|
  std::string region = "all";
  std::size_t pixel_count = 0;

  std::string to_text() const;  // flat key-value lines
};

// Thresholds reported by default.
inline const std::vector<double> kBadThresholds = {0.5, 1.0, 2.0, 3.0, 4.0};
inline const std::vector<int> kQuantilePercents = {50, 90, 95, 99};

// Evaluates pred against gt over region & both validity masks.
EvalResult evaluate(const DisparityMap& pred, const DisparityMap& gt, const BoolMask& region,
                    const std::string& region_name = "all");

struct RegionMasks {
  BoolMask all;
  BoolMask noc;                     // non-occluded via ground-truth LR check
  std::vector<BoolMask> fine;       // per level, upsampled to full resolution
};

// Builds the evaluation regions from the ground-truth pair and the per-level
// fine masks (nearest-neighbor upsampled to the full resolution).
RegionMasks region_masks(const DisparityMap& gt_left, const DisparityMap& gt_right,
                         const std::vector<FineMask>& fine_masks, int scale);

BoolMask mask_and(const BoolMask& a, const BoolMask& b);
BoolMask mask_or(const BoolMask& a, const BoolMask& b);

}  // namespace stereodecomp
