#include "stereodecomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stereodecomp/fusion.hpp"

namespace stereodecomp {

EvalResult evaluate(const DisparityMap& pred, const DisparityMap& gt, const BoolMask& region,
                    const std::string& region_name) {
  if (pred.height() != gt.height() || pred.width() != gt.width())
    throw InvalidInput("prediction and ground truth differ in size");
  if (region.height != gt.height() || region.width != gt.width())
    throw InvalidInput("region mask differs in size");

  std::vector<double> errors;
  double sum = 0.0, sum_sq = 0.0;
  std::size_t d1_outliers = 0;
  std::map<double, std::size_t> bad_counts;
  for (double tau : kBadThresholds) bad_counts[tau] = 0;

  for (int r = 0; r < gt.height(); ++r)
    for (int c = 0; c < gt.width(); ++c) {
      if (!region.at(r, c) || !pred.valid.at(r, c) || !gt.valid.at(r, c)) continue;
      const double err = std::abs(pred.at(r, c) - gt.at(r, c));
      errors.push_back(err);
      sum += err;
      sum_sq += err * err;
      for (auto& [tau, count] : bad_counts)
        if (err > tau) ++count;
      if (err > 3.0 && err > 0.05 * std::abs(gt.at(r, c))) ++d1_outliers;
    }
  if (errors.empty()) throw InvalidInput("empty evaluation region");

  EvalResult out;
  out.region = region_name;
  out.pixel_count = errors.size();
  const double n = static_cast<double>(errors.size());
  out.epe = sum / n;
  out.rms = std::sqrt(sum_sq / n);
  out.d1 = d1_outliers / n;
  for (auto& [tau, count] : bad_counts) out.bad[tau] = count / n;

  std::sort(errors.begin(), errors.end());
  for (int pct : kQuantilePercents) {
    // Nearest-rank quantile: smallest error with rank >= ceil(pct/100 * n).
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(pct / 100.0 * static_cast<double>(errors.size())));
    out.quantiles[pct] = errors[std::max<std::size_t>(rank, 1) - 1];
  }
  return out;
}

std::string EvalResult::to_text() const {
  std::ostringstream text;
  text.precision(6);
  text << std::fixed;
  text << "region " << region << '\n';
  text << "pixels " << pixel_count << '\n';
  text << "epe " << epe << '\n';
  for (const auto& [tau, fraction] : bad) text << "bad_" << tau << ' ' << fraction << '\n';
  text << "d1 " << d1 << '\n';
  text << "rms " << rms << '\n';
  for (const auto& [pct, value] : quantiles) text << "a" << pct << ' ' << value << '\n';
  return text.str();
}

RegionMasks region_masks(const DisparityMap& gt_left, const DisparityMap& gt_right,
                         const std::vector<FineMask>& fine_masks, int scale) {
  RegionMasks out;
  out.all = BoolMask(gt_left.height(), gt_left.width(), true);
  const BoolMask occluded = occlusion_from_lr(gt_left, gt_right, 1.0);
  out.noc = BoolMask(gt_left.height(), gt_left.width());
  for (int r = 0; r < gt_left.height(); ++r)
    for (int c = 0; c < gt_left.width(); ++c) out.noc.set(r, c, !occluded.at(r, c));

  for (const auto& fm : fine_masks) {
    const int factor = [&] {
      int f = 1;
      for (int h = fm.mask.height; h < gt_left.height(); h *= scale) f *= scale;
      return f;
    }();
    BoolMask up(gt_left.height(), gt_left.width());
    for (int r = 0; r < gt_left.height(); ++r)
      for (int c = 0; c < gt_left.width(); ++c)
        up.set(r, c, fm.mask.at(std::min(r / factor, fm.mask.height - 1),
                                std::min(c / factor, fm.mask.width - 1)));
    out.fine.push_back(std::move(up));
  }
  return out;
}

BoolMask mask_and(const BoolMask& a, const BoolMask& b) {
  BoolMask out(a.height, a.width);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = a.data[i] && b.data[i];
  return out;
}

BoolMask mask_or(const BoolMask& a, const BoolMask& b) {
  BoolMask out(a.height, a.width);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = a.data[i] || b.data[i];
  return out;
}

}  // namespace stereodecomp
