#include "stereodecomp/sparse_match.hpp"

#include <cmath>
#include <random>

namespace stereodecomp {

std::vector<int> candidate_set(int row, int col, const FineMask& left_mask,
                               const FineMask& right_mask, int disparities) {
  if (!left_mask.mask.at(row, col)) throw InvalidInput("pixel not in the left fine mask");
  std::vector<int> candidates;
  const int dmax = std::min(disparities - 1, col);
  for (int d = 0; d <= dmax; ++d)
    if (right_mask.mask.at(row, col - d)) candidates.push_back(d);
  return candidates;
}

namespace {

struct PixelSoftmax {
  std::vector<double> probs;  // aligned with the candidate list
  double mean = 0.0;
};

PixelSoftmax softmax_over(const Grid& left, const Grid& right, int r, int c,
                          const std::vector<int>& candidates) {
  PixelSoftmax out;
  out.probs.resize(candidates.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double acc = 0.0;
    for (int ch = 0; ch < left.channels; ++ch)
      acc += left.at(ch, r, c) * right.at(ch, r, c - candidates[i]);
    out.probs[i] = acc;
    best = std::max(best, acc);
  }
  double norm = 0.0;
  for (auto& p : out.probs) {
    p = std::exp(p - best);
    norm += p;
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.probs[i] /= norm;
    out.mean += out.probs[i] * candidates[i];
  }
  return out;
}

}  // namespace

SparseField sparse_forward(const Grid& left, const Grid& right, const FineMask& left_mask,
                           const FineMask& right_mask, int disparities) {
  if (!left.same_shape(right)) throw InvalidInput("left/right feature shapes differ");
  if (left.height != left_mask.mask.height || left.width != left_mask.mask.width)
    throw InvalidInput("mask dimensions do not match the features");
  SparseField field;
  field.level = left_mask.level;
  field.disparities = disparities;
  for (int r = 0; r < left.height; ++r) {
    if (left_mask.row_counts.empty() ? false : left_mask.row_counts[r] == 0) continue;
    for (int c = 0; c < left.width; ++c) {
      if (!left_mask.mask.at(r, c)) continue;
      const auto candidates = candidate_set(r, c, left_mask, right_mask, disparities);
      if (candidates.empty()) continue;
      const auto sm = softmax_over(left, right, r, c, candidates);
      double var = 0.0;
      for (std::size_t i = 0; i < candidates.size(); ++i)
        var += sm.probs[i] * (sm.mean - candidates[i]) * (sm.mean - candidates[i]);
      field.entries.push_back({r, c, sm.mean, var, static_cast<int>(candidates.size())});
      field.score_evaluations += candidates.size();
    }
  }
  return field;
}

GradientBundle sparse_backward(const SparseField& field, const std::vector<double>& upstream,
                               const Grid& left, const Grid& right, const FineMask& left_mask,
                               const FineMask& right_mask) {
  if (upstream.size() != field.entries.size())
    throw InvalidInput("upstream gradient not aligned with the sparse field");
  GradientBundle grads{Grid(left.channels, left.height, left.width),
                       Grid(right.channels, right.height, right.width)};
  for (std::size_t i = 0; i < field.entries.size(); ++i) {
    const auto& entry = field.entries[i];
    const auto candidates =
        candidate_set(entry.row, entry.col, left_mask, right_mask, field.disparities);
    if (static_cast<int>(candidates.size()) != entry.candidate_count)
      throw InvalidInput("sparse field inconsistent with the masks");
    const auto sm = softmax_over(left, right, entry.row, entry.col, candidates);
    // dD/dscore(d) = P(d) (d - D); score is a plain dot product, so the
    // chain rule turns each candidate into one left and one right term.
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double coeff = upstream[i] * sm.probs[k] * (candidates[k] - sm.mean);
      const int rc = entry.col - candidates[k];
      for (int ch = 0; ch < left.channels; ++ch) {
        grads.left.at(ch, entry.row, entry.col) += coeff * right.at(ch, entry.row, rc);
        grads.right.at(ch, entry.row, rc) += coeff * left.at(ch, entry.row, entry.col);
      }
    }
  }
  return grads;
}

GradCheckReport gradcheck(std::uint64_t seed, int height, int width, int disparities,
                          double step) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::bernoulli_distribution coin(0.4);

  const int channels = 4;
  Grid left(channels, height, width), right(channels, height, width);
  for (auto& v : left.data) v = unit(rng);
  for (auto& v : right.data) v = unit(rng);

  FineMask lm, rm;
  lm.mask = BoolMask(height, width);
  rm.mask = BoolMask(height, width);
  lm.row_counts.assign(height, 0);
  rm.row_counts.assign(height, 0);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      if (coin(rng)) {
        lm.mask.set(r, c, true);
        lm.row_counts[r]++;
      }
      if (coin(rng)) {
        rm.mask.set(r, c, true);
        rm.row_counts[r]++;
      }
    }
  lm.selected = lm.mask.count();
  rm.selected = rm.mask.count();

  const auto field = sparse_forward(left, right, lm, rm, disparities);
  std::vector<double> weights(field.entries.size());
  for (auto& w : weights) w = unit(rng);

  const auto loss = [&](const Grid& l, const Grid& g) {
    const auto f = sparse_forward(l, g, lm, rm, disparities);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.entries.size(); ++i) acc += weights[i] * f.entries[i].disparity;
    return acc;
  };

  const auto analytic = sparse_backward(field, weights, left, right, lm, rm);

  GradCheckReport report;
  const auto check_tensor = [&](Grid& tensor, const Grid& grad, double& max_rel, bool is_left) {
    for (std::size_t i = 0; i < tensor.data.size(); ++i) {
      const double a = grad.data[i];
      const double saved = tensor.data[i];
      tensor.data[i] = saved + step;
      const double up = is_left ? loss(tensor, right) : loss(left, tensor);
      tensor.data[i] = saved - step;
      const double down = is_left ? loss(tensor, right) : loss(left, tensor);
      tensor.data[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double rel = std::abs(a - numeric) /
                         std::max({1.0, std::abs(a), std::abs(numeric)});
      max_rel = std::max(max_rel, rel);
    }
  };
  check_tensor(left, analytic.left, report.max_rel_error_left, true);
  check_tensor(right, analytic.right, report.max_rel_error_right, false);
  return report;
}

}  // namespace stereodecomp
