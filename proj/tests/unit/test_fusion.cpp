#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stereodecomp/fusion.hpp"

using namespace stereodecomp;

namespace {

FineMask mask_from(const BoolMask& m, int level = 1) {
  FineMask out;
  out.level = level;
  out.mask = m;
  out.selected = m.count();
  out.row_counts.assign(m.height, 0);
  for (int r = 0; r < m.height; ++r)
    for (int c = 0; c < m.width; ++c)
      if (m.at(r, c)) out.row_counts[r]++;
  return out;
}

SparseField field_with(std::vector<SparseEntry> entries, int disparities = 16) {
  SparseField f;
  f.disparities = disparities;
  f.entries = std::move(entries);
  for (const auto& e : f.entries) f.score_evaluations += e.candidate_count;
  return f;
}

}  // namespace

TEST_SUITE("fusion") {
  TEST_CASE("upsampling scales values and preserves constants") {
    const DisparityMap coarse(4, 4, 3.0);
    const Grid guide(2, 8, 8, 0.0);
    const auto up = upsample_disparity(coarse, guide, 2, true);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) CHECK(up.at(r, c) == doctest::Approx(6.0));
    const auto plain = upsample_disparity(coarse, guide, 2, false);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) CHECK(plain.at(r, c) == doctest::Approx(6.0));
    CHECK_THROWS_AS(upsample_disparity(coarse, Grid(2, 9, 8, 0.0), 2), InvalidInput);
  }

  TEST_CASE("uniform guidance reproduces the bilinear ramp in the interior") {
    DisparityMap coarse(6, 10);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 10; ++c) coarse.at(r, c) = 0.5 * c + 1.0;
    const Grid guide(1, 12, 20, 0.25);
    const auto guided = upsample_disparity(coarse, guide, 2, true);
    const auto plain = upsample_disparity(coarse, guide, 2, false);
    for (int r = 5; r < 7; ++r)
      for (int c = 5; c < 15; ++c)
        CHECK(std::abs(guided.at(r, c) - plain.at(r, c)) <= 0.02);
  }

  TEST_CASE("disparity steps aligned with guide edges stay sharp") {
    const int coarse_w = 16, coarse_h = 8, scale = 2;
    DisparityMap coarse(coarse_h, coarse_w);
    for (int r = 0; r < coarse_h; ++r)
      for (int c = 0; c < coarse_w; ++c) coarse.at(r, c) = c < 8 ? 2.0 : 5.0;
    Grid guide(1, coarse_h * scale, coarse_w * scale);
    for (int r = 0; r < guide.height; ++r)
      for (int c = 0; c < guide.width; ++c) guide.at(0, r, c) = c < 16 ? 0.0 : 3.0;
    const auto up = upsample_disparity(coarse, guide, scale, true);
    for (int r = 0; r < guide.height; ++r)
      for (int c = 0; c < guide.width; ++c) {
        const double want = c < 16 ? 4.0 : 10.0;
        if (c <= 14 || c >= 17) CHECK(std::abs(up.at(r, c) - want) <= 0.1);
      }
  }

  TEST_CASE("left-right consistency marks disagreements and frame exits") {
    const DisparityMap zeros(4, 8, 0.0);
    const auto none = occlusion_from_lr(zeros, zeros, 1.0);
    CHECK(none.count() == 0);

    const DisparityMap fives(4, 8, 5.0);
    const auto occ = occlusion_from_lr(fives, fives, 1.0);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 8; ++c) CHECK(occ.at(r, c) == (c < 5));

    DisparityMap disagree = fives;
    disagree.at(1, 7) = 7.0;  // right map still claims 5 at the warp target
    const auto occ2 = occlusion_from_lr(disagree, fives, 1.0);
    CHECK(occ2.at(1, 7));
  }

  TEST_CASE("soft mask gates on variance and occlusion") {
    const auto fm = mask_from(BoolMask(4, 8, true));
    BoolMask occl(4, 8);
    occl.set(2, 3, true);
    const double sigma_v = 1.5;
    const auto field = field_with({{1, 2, 4.0, 0.0, 3},
                                   {2, 3, 4.0, 0.0, 3},
                                   {3, 4, 4.0, sigma_v * sigma_v, 3}});
    const Grid mask = soft_mask(field, fm, occl, sigma_v);
    CHECK(mask.at(0, 1, 2) == doctest::Approx(1.0));
    CHECK(mask.at(0, 2, 3) == doctest::Approx(0.0));
    CHECK(mask.at(0, 3, 4) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(mask.at(0, 0, 0) == 0.0);
  }

  TEST_CASE("soft fusion is the per-pixel convex combination") {
    const DisparityMap dense(4, 8, 2.0);
    const auto field = field_with({{1, 3, 4.0, 0.0, 2}});
    Grid mask(1, 4, 8);

    auto fused = soft_fuse(dense, field, mask);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 8; ++c) CHECK(fused.at(r, c) == 2.0);

    mask.at(0, 1, 3) = 1.0;
    fused = soft_fuse(dense, field, mask);
    CHECK(fused.at(1, 3) == doctest::Approx(4.0));

    mask.at(0, 1, 3) = 0.5;
    fused = soft_fuse(dense, field, mask);
    CHECK(fused.at(1, 3) == doctest::Approx(3.0));
    CHECK(fused.at(0, 0) == 2.0);

    // Convexity over random masks.
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      mask.at(0, 1, 3) = unit(rng);
      fused = soft_fuse(dense, field, mask);
      CHECK(fused.at(1, 3) >= 2.0);
      CHECK(fused.at(1, 3) <= 4.0);
    }
  }

  TEST_CASE("hard fusion overwrites entries") {
    const DisparityMap dense(4, 8, 2.0);
    CHECK(hard_fuse(dense, field_with({})).values.data == dense.values.data);
    const auto fused = hard_fuse(dense, field_with({{2, 5, 9.0, 0.2, 4}}));
    CHECK(fused.at(2, 5) == 9.0);
    CHECK(fused.at(2, 4) == 2.0);
  }

  TEST_CASE("soft fusion with zero variance and no occlusion equals hard fusion") {
    const DisparityMap dense(4, 8, 2.0);
    const auto fm = mask_from(BoolMask(4, 8, true));
    const BoolMask occl(4, 8);
    const auto field = field_with({{0, 1, 3.5, 0.0, 2}, {2, 6, 7.25, 0.0, 3}});
    const Grid mask = soft_mask(field, fm, occl, 1.0);
    const auto soft = soft_fuse(dense, field, mask);
    const auto hard = hard_fuse(dense, field);
    CHECK(soft.values.data == hard.values.data);
  }

  TEST_CASE("refinement removes speckle and fixes constants") {
    const Grid guide(3, 6, 6, 0.5);
    DisparityMap flat(6, 6, 1.5);
    const auto same = refine(flat, guide, 0);
    CHECK(same.values.data == flat.values.data);
    const auto median = refine(flat, guide, 2);
    CHECK(median.values.data == flat.values.data);

    DisparityMap speckled(6, 6, 0.0);
    speckled.at(3, 3) = 50.0;
    const auto cleaned = refine(speckled, guide, 2);
    CHECK(cleaned.at(3, 3) == doctest::Approx(0.0));
  }
}
