#pragma once

// Brute-force reference implementations used by the unit and acceptance
// suites. These stay independent of the library code paths they check: plain
// loops, no shared helpers beyond the Grid container itself.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "stereodecomp/dense_match.hpp"
#include "stereodecomp/detail_detect.hpp"
#include "stereodecomp/grid.hpp"

namespace oracle {

using stereodecomp::BoolMask;
using stereodecomp::CostVolume;
using stereodecomp::Grid;

inline Grid random_grid(std::mt19937& rng, int channels, int height, int width,
                        double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Grid g(channels, height, width);
  for (auto& v : g.data) v = dist(rng);
  return g;
}

inline BoolMask random_mask(std::mt19937& rng, int height, int width, double density) {
  std::bernoulli_distribution coin(density);
  BoolMask m(height, width);
  for (auto& v : m.data) v = coin(rng) ? 1 : 0;
  return m;
}

// Triple loop over (r, c, d) with the same -inf convention as the library.
inline CostVolume naive_cost_volume(const Grid& left, const Grid& right, int disparities) {
  CostVolume cv(left.height, left.width, disparities);
  for (int r = 0; r < left.height; ++r)
    for (int c = 0; c < left.width; ++c)
      for (int d = 0; d < disparities; ++d) {
        if (c - d < 0) continue;
        double acc = 0.0;
        for (int ch = 0; ch < left.channels; ++ch)
          acc += left.at(ch, r, c) * right.at(ch, r, c - d);
        cv.at(r, c, d) = acc;
        cv.score_evaluations++;
      }
  return cv;
}

inline CostVolume naive_aggregate(const CostVolume& cv, int radius) {
  if (radius == 0) return cv;
  CostVolume out(cv.height, cv.width, cv.disparities);
  out.score_evaluations = cv.score_evaluations;
  for (int r = 0; r < cv.height; ++r)
    for (int c = 0; c < cv.width; ++c)
      for (int d = 0; d < cv.disparities; ++d) {
        if (c - d < 0) continue;
        double acc = 0.0;
        int n = 0;
        for (int rr = std::max(0, r - radius); rr <= std::min(cv.height - 1, r + radius); ++rr)
          for (int cc = std::max(0, c - radius); cc <= std::min(cv.width - 1, c + radius); ++cc) {
            if (cc - d < 0) continue;
            acc += cv.at(rr, cc, d);
            ++n;
          }
        out.at(r, c, d) = acc / n;
      }
  return out;
}

struct NaivePixelRegression {
  double disparity = 0.0;
  double variance = 0.0;
  std::vector<double> probabilities;
};

// Stabilized softmax over the given scores, probabilities retained so tests
// can check normalization directly.
inline NaivePixelRegression naive_softargmax(const std::vector<double>& scores,
                                             const std::vector<int>& candidates) {
  NaivePixelRegression out;
  double best = -std::numeric_limits<double>::infinity();
  for (double s : scores) best = std::max(best, s);
  double norm = 0.0;
  out.probabilities.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.probabilities[i] = std::exp(scores[i] - best);
    norm += out.probabilities[i];
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.probabilities[i] /= norm;
    out.disparity += out.probabilities[i] * candidates[i];
  }
  for (std::size_t i = 0; i < scores.size(); ++i)
    out.variance += out.probabilities[i] * (out.disparity - candidates[i]) *
                    (out.disparity - candidates[i]);
  return out;
}

inline NaivePixelRegression naive_regress_pixel(const CostVolume& cv, int r, int c) {
  std::vector<double> scores;
  std::vector<int> candidates;
  for (int d = 0; d < cv.disparities && d <= c; ++d) {
    scores.push_back(cv.at(r, c, d));
    candidates.push_back(d);
  }
  return naive_softargmax(scores, candidates);
}

// Exhaustive minimum of |M| - alpha * sum_{p in M} sqrt(e_p) over every mask
// of a tiny grid. Ties prefer smaller masks, then lexicographic order.
struct NaiveSelection {
  std::vector<bool> mask;
  double objective = 0.0;
};

inline NaiveSelection enumerate_best_mask(const std::vector<double>& energy, double alpha) {
  const std::size_t n = energy.size();
  NaiveSelection best;
  best.mask.assign(n, false);
  int best_cardinality = 0;
  for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
    double objective = 0.0;
    int cardinality = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (bits & (1ULL << i)) {
        objective += 1.0 - alpha * std::sqrt(energy[i]);
        ++cardinality;
      }
    if (objective < best.objective ||
        (objective == best.objective && cardinality < best_cardinality)) {
      best.objective = objective;
      best_cardinality = cardinality;
      for (std::size_t i = 0; i < n; ++i) best.mask[i] = bits & (1ULL << i);
    }
  }
  return best;
}

}  // namespace oracle
