#include "stereodecomp/detail_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stereodecomp {

namespace {
constexpr double kAlphaBeta = 1.6;    // multiple of the median root energy
constexpr double kAlphaFloor = 0.05;  // absolute threshold floor (feature units)
}  // namespace

Grid diff_energy(const Grid& features, const Grid& upsampled_coarse) {
  if (!features.same_shape(upsampled_coarse))
    throw InvalidInput("diff_energy: feature shapes differ");
  Grid e(1, features.height, features.width);
  for (int c = 0; c < features.channels; ++c)
    for (int r = 0; r < features.height; ++r)
      for (int w = 0; w < features.width; ++w) {
        const double d = features.at(c, r, w) - upsampled_coarse.at(c, r, w);
        e.at(0, r, w) += d * d;
      }
  return e;
}

Grid pool_energy(const Grid& energy, int radius) {
  if (energy.channels != 1) throw InvalidInput("energy grid must be single-channel");
  if (radius < 0) throw InvalidInput("radius must be >= 0");
  if (radius == 0) return energy;
  Grid out(1, energy.height, energy.width);
  for (int r = 0; r < energy.height; ++r)
    for (int w = 0; w < energy.width; ++w) {
      double acc = 0.0;
      int n = 0;
      for (int rr = std::max(0, r - radius); rr <= std::min(energy.height - 1, r + radius); ++rr)
        for (int ww = std::max(0, w - radius); ww <= std::min(energy.width - 1, w + radius); ++ww) {
          acc += energy.at(0, rr, ww);
          ++n;
        }
      out.at(0, r, w) = acc / n;
    }
  return out;
}

Selection select_fine_grained(const Grid& energy, double alpha, int level) {
  if (energy.channels != 1) throw InvalidInput("energy grid must be single-channel");
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");

  const std::size_t n = energy.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Descending by root energy; ties broken by (row, col) order for
  // schedule-independent output.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return energy.data[a] > energy.data[b];
  });

  double best = 0.0;   // L(0)
  std::size_t best_k = 0;
  double objective = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    objective += 1.0 - alpha * std::sqrt(energy.data[order[k - 1]]);
    if (objective < best) {
      best = objective;
      best_k = k;
    }
  }

  Selection sel;
  sel.objective = best;
  sel.mask.level = level;
  sel.mask.mask = BoolMask(energy.height, energy.width);
  sel.mask.row_counts.assign(energy.height, 0);
  for (std::size_t i = 0; i < best_k; ++i) {
    const std::size_t idx = order[i];
    sel.mask.mask.data[idx] = 1;
    sel.mask.row_counts[idx / energy.width] += 1;
  }
  sel.mask.selected = best_k;
  return sel;
}

double default_alpha(const Grid& energy) {
  std::vector<double> roots(energy.data.size());
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = std::sqrt(energy.data[i]);
  const std::size_t mid = roots.size() / 2;
  std::nth_element(roots.begin(), roots.begin() + mid, roots.end());
  return 1.0 / (kAlphaBeta * roots[mid] + kAlphaFloor);
}

SparsityStats sparsity_stats(const FineMask& mask) {
  SparsityStats stats;
  const double per_row = static_cast<double>(mask.mask.width);
  stats.row_fractions.reserve(mask.row_counts.size());
  for (auto n : mask.row_counts) stats.row_fractions.push_back(n / per_row);
  const double total = per_row * mask.mask.height;
  stats.global_fraction = total > 0 ? mask.selected / total : 0.0;
  stats.search_fraction = stats.global_fraction;
  return stats;
}

}  // namespace stereodecomp
