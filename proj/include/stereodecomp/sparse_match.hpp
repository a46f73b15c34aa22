#pragma once

#include <cstdint>
#include <vector>

#include "stereodecomp/detail_detect.hpp"
#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// One matched detail pixel: regressed disparity, its softmax variance and
// the number of hypotheses that were scored for it.
struct SparseEntry {
  int row = 0;
  int col = 0;
  double disparity = 0.0;
  double variance = 0.0;
  int candidate_count = 0;
};

// Sparse disparity estimates over a level's fine-grained mask, in (row, col)
// order. Left-mask pixels with no admissible hypothesis are absent.
struct SparseField {
  int level = 0;
  int disparities = 0;  // D_l used for the search
  std::vector<SparseEntry> entries;
  std::uint64_t score_evaluations = 0;  // equals the sum of candidate_count
};

// Gradients of a scalar loss with respect to both feature grids.
struct GradientBundle {
  Grid left;
  Grid right;
};

// All admissible hypotheses for a left detail pixel: in-frame offsets whose
// warp target is itself a right detail pixel. Ascending order.
std::vector<int> candidate_set(int row, int col, const FineMask& left_mask,
                               const FineMask& right_mask, int disparities);

SparseField sparse_forward(const Grid& left, const Grid& right, const FineMask& left_mask,
                           const FineMask& right_mask, int disparities);

// Reverse-mode gradients for sparse_forward. `upstream` holds dL/d(disparity)
// per field entry, aligned with field.entries. Right-feature contributions
// from multiple left pixels are accumulated in fixed entry order.
GradientBundle sparse_backward(const SparseField& field, const std::vector<double>& upstream,
                               const Grid& left, const Grid& right, const FineMask& left_mask,
                               const FineMask& right_mask);

struct GradCheckReport {
  double max_rel_error_left = 0.0;
  double max_rel_error_right = 0.0;
  double max_rel_error() const {
    return max_rel_error_left > max_rel_error_right ? max_rel_error_left : max_rel_error_right;
  }
};

// Compares sparse_backward against central finite differences of the loss
// L = sum_i w_i * disparity_i with random weights, on a random instance of
// the given size. Relative error uses a unit floor so that near-zero
// gradients are measured absolutely.
GradCheckReport gradcheck(std::uint64_t seed, int height, int width, int disparities,
                          double step = 1e-3);

}  // namespace stereodecomp
