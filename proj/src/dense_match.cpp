#include "stereodecomp/dense_match.hpp"

#include <cmath>
#include <limits>

#include "stereodecomp/parallel.hpp"

namespace stereodecomp {

namespace {
constexpr double kInvalidScore = -std::numeric_limits<double>::infinity();
}

CostVolume::CostVolume(int height_, int width_, int disparities_) {
  if (height_ < 1 || width_ < 1 || disparities_ < 1)
    throw InvalidInput("cost volume dimensions must be positive");
  height = height_;
  width = width_;
  disparities = disparities_;
  scores.assign(static_cast<std::size_t>(height) * width * disparities, kInvalidScore);
}

std::uint64_t CostVolume::valid_count() const {
  std::uint64_t n = 0;
  for (int c = 0; c < width; ++c) n += std::min(disparities, c + 1);
  return n * height;
}

CostVolume build_cost_volume(const Grid& left, const Grid& right, int disparities) {
  if (!left.same_shape(right)) throw InvalidInput("left/right feature shapes differ");
  if (disparities > left.width) throw InvalidConfig("disparity range exceeds image width");
  CostVolume cv(left.height, left.width, disparities);

  std::vector<std::uint64_t> row_counts(left.height, 0);
  parallel_rows(left.height, [&](int r) {
    std::uint64_t count = 0;
    for (int c = 0; c < left.width; ++c) {
      const int dmax = std::min(disparities - 1, c);
      for (int d = 0; d <= dmax; ++d) {
        double acc = 0.0;
        for (int ch = 0; ch < left.channels; ++ch)
          acc += left.at(ch, r, c) * right.at(ch, r, c - d);
        cv.at(r, c, d) = acc;
        ++count;
      }
    }
    row_counts[r] = count;
  });
  for (auto n : row_counts) cv.score_evaluations += n;
  return cv;
}

CostVolume aggregate_costs(const CostVolume& cv, int radius) {
  if (radius < 0) throw InvalidInput("radius must be >= 0");
  if (radius == 0) return cv;
  CostVolume out(cv.height, cv.width, cv.disparities);
  out.score_evaluations = cv.score_evaluations;
  parallel_rows(cv.height, [&](int r) {
    const int r0 = std::max(0, r - radius);
    const int r1 = std::min(cv.height - 1, r + radius);
    for (int c = 0; c < cv.width; ++c) {
      const int c0 = std::max(0, c - radius);
      const int c1 = std::min(cv.width - 1, c + radius);
      for (int d = 0; d < cv.disparities; ++d) {
        if (!cv.valid(r, c, d)) continue;
        double acc = 0.0;
        int n = 0;
        for (int rr = r0; rr <= r1; ++rr)
          for (int cc = c0; cc <= c1; ++cc) {
            if (!cv.valid(rr, cc, d)) continue;
            acc += cv.at(rr, cc, d);
            ++n;
          }
        out.at(r, c, d) = acc / n;
      }
    }
  });
  return out;
}

Regression softargmax_regress(const CostVolume& cv) {
  Regression out;
  out.disparity = DisparityMap(cv.height, cv.width, 0.0, false);
  out.variance = Grid(1, cv.height, cv.width);
  parallel_rows(cv.height, [&](int r) {
    for (int c = 0; c < cv.width; ++c) {
      const int dmax = std::min(cv.disparities - 1, c);
      if (dmax < 0) continue;  // zero valid hypotheses: left invalid
      double best = kInvalidScore;
      for (int d = 0; d <= dmax; ++d) best = std::max(best, cv.at(r, c, d));
      double norm = 0.0;
      for (int d = 0; d <= dmax; ++d) norm += std::exp(cv.at(r, c, d) - best);
      double mean = 0.0;
      for (int d = 0; d <= dmax; ++d) mean += std::exp(cv.at(r, c, d) - best) / norm * d;
      double var = 0.0;
      for (int d = 0; d <= dmax; ++d) {
        const double p = std::exp(cv.at(r, c, d) - best) / norm;
        var += p * (mean - d) * (mean - d);
      }
      out.disparity.at(r, c) = mean;
      out.disparity.valid.set(r, c, true);
      out.variance.at(0, r, c) = var;
    }
  });
  return out;
}

}  // namespace stereodecomp
