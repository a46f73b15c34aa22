#include "stereodecomp/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stereodecomp/parallel.hpp"
#include "stereodecomp/pyramid.hpp"

namespace stereodecomp {

namespace {

// Mean squared per-channel difference between two feature vectors.
double feature_dist2(const Grid& f, int r0, int c0, int r1, int c1) {
  double acc = 0.0;
  for (int ch = 0; ch < f.channels; ++ch) {
    const double d = f.at(ch, r0, c0) - f.at(ch, r1, c1);
    acc += d * d;
  }
  return acc / f.channels;
}

}  // namespace

DisparityMap upsample_disparity(const DisparityMap& coarse, const Grid& guide, int scale,
                                bool guided, double sigma_range) {
  if (guide.height != coarse.height() * scale || guide.width != coarse.width() * scale)
    throw InvalidInput("guide dimensions must equal scale * coarse dimensions");
  DisparityMap out;
  out.valid = BoolMask(guide.height, guide.width, true);
  if (!guided) {
    Grid up = upsample_features(coarse.values, scale);
    for (auto& v : up.data) v *= scale;
    out.values = std::move(up);
    return out;
  }

  // Joint-bilateral upsampling: each fine pixel averages nearby coarse
  // samples, weighted by distance and by guide-feature similarity at the
  // sample positions. Sampling the coarse map directly keeps disparity
  // steps aligned with guide edges instead of smearing them first.
  const double spacing_y =
      coarse.height() > 1 ? double(guide.height - 1) / (coarse.height() - 1) : 1.0;
  const double spacing_x =
      coarse.width() > 1 ? double(guide.width - 1) / (coarse.width() - 1) : 1.0;
  const double reach = 2.0 * scale;  // spatial kernel support in fine pixels
  const double spatial_sigma2 = 2.0 * scale * scale;
  const double range_sigma2 = sigma_range * sigma_range;

  out.values = Grid(1, guide.height, guide.width);
  parallel_rows(guide.height, [&](int r) {
    const int ky0 = std::max(0, static_cast<int>(std::floor((r - reach) / spacing_y)));
    const int ky1 = std::min(coarse.height() - 1,
                             static_cast<int>(std::ceil((r + reach) / spacing_y)));
    for (int c = 0; c < guide.width; ++c) {
      const int kx0 = std::max(0, static_cast<int>(std::floor((c - reach) / spacing_x)));
      const int kx1 = std::min(coarse.width() - 1,
                               static_cast<int>(std::ceil((c + reach) / spacing_x)));
      double num = 0.0, den = 0.0;
      for (int ky = ky0; ky <= ky1; ++ky) {
        const double fy = ky * spacing_y;
        const int gy = static_cast<int>(std::lround(fy));
        for (int kx = kx0; kx <= kx1; ++kx) {
          const double fx = kx * spacing_x;
          const int gx = static_cast<int>(std::lround(fx));
          const double dy = r - fy, dx = c - fx;
          const double w = std::exp(-(dy * dy + dx * dx) / spatial_sigma2 -
                                    feature_dist2(guide, r, c, gy, gx) / range_sigma2);
          num += w * coarse.at(ky, kx);
          den += w;
        }
      }
      out.values.at(0, r, c) = scale * num / den;
    }
  });
  return out;
}

BoolMask occlusion_from_lr(const DisparityMap& left, const DisparityMap& right,
                           double tolerance) {
  if (left.height() != right.height() || left.width() != right.width())
    throw InvalidInput("disparity maps differ in size");
  BoolMask occluded(left.height(), left.width());
  for (int r = 0; r < left.height(); ++r)
    for (int c = 0; c < left.width(); ++c) {
      if (!left.valid.at(r, c)) {
        occluded.set(r, c, true);
        continue;
      }
      const double d = left.at(r, c);
      const int target = c - static_cast<int>(std::lround(d));
      if (target < 0 || target >= left.width() || !right.valid.at(r, target) ||
          std::abs(d - right.at(r, target)) > tolerance) {
        occluded.set(r, c, true);
      }
    }
  return occluded;
}

Grid soft_mask(const SparseField& field, const FineMask& fine_mask, const BoolMask& occlusion,
               double sigma_v) {
  Grid mask(1, fine_mask.mask.height, fine_mask.mask.width);
  const double inv_sigma2 = 1.0 / (sigma_v * sigma_v);
  for (const auto& e : field.entries) {
    if (occlusion.at(e.row, e.col)) continue;
    mask.at(0, e.row, e.col) = std::exp(-e.variance * inv_sigma2);
  }
  return mask;
}

DisparityMap soft_fuse(const DisparityMap& dense, const SparseField& field, const Grid& mask) {
  DisparityMap out = dense;
  for (const auto& e : field.entries) {
    const double m = mask.at(0, e.row, e.col);
    out.at(e.row, e.col) = dense.at(e.row, e.col) * (1.0 - m) + e.disparity * m;
    out.valid.set(e.row, e.col, true);
  }
  return out;
}

DisparityMap hard_fuse(const DisparityMap& dense, const SparseField& field) {
  DisparityMap out = dense;
  for (const auto& e : field.entries) {
    out.at(e.row, e.col) = e.disparity;
    out.valid.set(e.row, e.col, true);
  }
  return out;
}

DisparityMap refine_rematch(const DisparityMap& map, const Grid& left, const Grid& right,
                            int disparities, const BoolMask& skip, double min_peak_gap,
                            std::uint64_t* evaluations) {
  if (!left.same_shape(right)) throw InvalidInput("left/right feature shapes differ");
  if (left.height != map.height() || left.width != map.width())
    throw InvalidInput("map dimensions differ from the features");
  DisparityMap out = map;
  std::vector<std::uint64_t> row_taps(map.height(), 0);
  parallel_rows(map.height(), [&](int r) {
    double scores[3];
    int candidates[3];
    for (int c = 0; c < map.width(); ++c) {
      if (!map.valid.at(r, c) || skip.at(r, c)) continue;
      const int base = static_cast<int>(std::lround(map.at(r, c)));
      int n = 0;
      double best = -std::numeric_limits<double>::infinity();
      double worst = std::numeric_limits<double>::infinity();
      for (int d = base - 1; d <= base + 1; ++d) {
        if (d < 0 || d >= disparities || c - d < 0) continue;
        double acc = 0.0;
        for (int ch = 0; ch < left.channels; ++ch)
          acc += left.at(ch, r, c) * right.at(ch, r, c - d);
        scores[n] = acc;
        candidates[n] = d;
        ++n;
        best = std::max(best, acc);
        worst = std::min(worst, acc);
      }
      row_taps[r] += n;
      if (n < 2 || best - worst < min_peak_gap) continue;
      double norm = 0.0;
      for (int i = 0; i < n; ++i) norm += std::exp(scores[i] - best);
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += std::exp(scores[i] - best) / norm * candidates[i];
      out.at(r, c) = mean;
    }
  });
  if (evaluations)
    for (auto taps : row_taps) *evaluations += taps;
  return out;
}

DisparityMap refine(const DisparityMap& map, const Grid& guide, int radius, double sigma_range) {
  if (radius < 0) throw InvalidInput("radius must be >= 0");
  if (radius == 0) return map;
  if (guide.height != map.height() || guide.width != map.width())
    throw InvalidInput("guide dimensions differ from the map");
  const double range_sigma2 = sigma_range * sigma_range;
  DisparityMap out = map;
  parallel_rows(map.height(), [&](int r) {
    std::vector<std::pair<double, double>> window;  // (value, weight)
    for (int c = 0; c < map.width(); ++c) {
      window.clear();
      double total = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= map.height()) continue;
        for (int dc = -radius; dc <= radius; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= map.width() || !map.valid.at(rr, cc)) continue;
          const double w = std::exp(-feature_dist2(guide, r, c, rr, cc) / range_sigma2);
          window.emplace_back(map.at(rr, cc), w);
          total += w;
        }
      }
      if (window.empty()) continue;
      std::sort(window.begin(), window.end());
      double acc = 0.0;
      for (const auto& [value, weight] : window) {
        acc += weight;
        if (acc >= 0.5 * total) {
          out.at(r, c) = value;
          break;
        }
      }
    }
  });
  return out;
}

}  // namespace stereodecomp
