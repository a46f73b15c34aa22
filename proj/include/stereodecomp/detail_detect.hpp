#pragma once

#include <vector>

#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// Pixels whose content does not survive downsampling to the previous level.
struct FineMask {
  int level = 0;
  BoolMask mask;
  std::size_t selected = 0;            // |FA|
  std::vector<std::size_t> row_counts;  // true entries per row
};

struct SparsityStats {
  double global_fraction = 0.0;          // r_spa
  double search_fraction = 0.0;          // r_dis, approximated by r_spa
  std::vector<double> row_fractions;
};

// Per-pixel squared feature distance between a level's features and the
// upsampled features of the level below it.
Grid diff_energy(const Grid& features, const Grid& upsampled_coarse);

// Box-mean of the energy. Detail loss is a property of structures, not of
// single pixels; pooling spreads the evidence over the lost structure so
// selection covers it contiguously in both views.
Grid pool_energy(const Grid& energy, int radius);

struct Selection {
  FineMask mask;
  double objective = 0.0;  // value of the minimized selection objective
};

// Selects the detail pixels by exact minimization of
//   L(FA) = |FA| - alpha * sum_{p in FA} sqrt(e_p),
// i.e. every pixel whose root energy exceeds 1/alpha. Sorting by sqrt(e)
// descending makes the best mask of each cardinality a prefix, so the
// global minimum is found by scanning prefix sizes (ties take the smaller
// mask). Larger alpha admits more pixels; alpha -> 0 selects nothing.
Selection select_fine_grained(const Grid& energy, double alpha, int level = 0);

// Scale-adaptive default: 1 / (beta * median(sqrt(e)) + floor). The floor
// keeps the threshold meaningful on levels where most of the image survives
// downsampling exactly (median energy 0).
double default_alpha(const Grid& energy);

SparsityStats sparsity_stats(const FineMask& mask);

}  // namespace stereodecomp
