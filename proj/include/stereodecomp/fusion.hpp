#pragma once

#include "stereodecomp/grid.hpp"
#include "stereodecomp/sparse_match.hpp"

namespace stereodecomp {

// Upsamples a disparity map to the next level: corner-aligned bilinear in
// space, values multiplied by `scale` (disparities are stored in the pixels
// of their own level). When `guided`, one joint-bilateral pass follows, with
// spatial sigma = scale and a range kernel on the per-channel mean squared
// feature distance of the guide.
DisparityMap upsample_disparity(const DisparityMap& coarse, const Grid& guide, int scale,
                                bool guided = true, double sigma_range = 1.0);

// Left-right consistency check: a pixel is occluded when its warp target is
// out of frame or the other view disagrees by more than `tolerance` pixels.
BoolMask occlusion_from_lr(const DisparityMap& left, const DisparityMap& right,
                           double tolerance);

// Variance- and occlusion-gated confidence for each sparse entry:
// exp(-variance / sigma_v^2), zeroed on occluded pixels. Zero off-entry.
Grid soft_mask(const SparseField& field, const FineMask& fine_mask, const BoolMask& occlusion,
               double sigma_v);

// Convex combination dense*(1-M) + sparse*M at entry pixels.
DisparityMap soft_fuse(const DisparityMap& dense, const SparseField& field, const Grid& mask);

// Sparse values overwrite the dense map at every entry.
DisparityMap hard_fuse(const DisparityMap& dense, const SparseField& field);

// One pass of feature-weighted median filtering; radius 0 is the identity.
DisparityMap refine(const DisparityMap& map, const Grid& guide, int radius,
                    double sigma_range = 1.0);

// Residual rematching around the current estimate: scores the three integer
// hypotheses nearest each pixel's disparity by feature cross-correlation and
// regresses them with the usual stabilized softmax. Pixels whose local score
// curve is flat (peak-to-min gap below min_peak_gap, e.g. textureless
// patches) and pixels flagged in `skip` keep their current value. The number
// of correlation taps is accumulated into `evaluations` when given.
DisparityMap refine_rematch(const DisparityMap& map, const Grid& left, const Grid& right,
                            int disparities, const BoolMask& skip, double min_peak_gap,
                            std::uint64_t* evaluations = nullptr);

}  // namespace stereodecomp
