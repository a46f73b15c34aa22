#include <cstdlib>
#include <random>

#include "doctest.h"
#include "stereodecomp/pyramid.hpp"
#include "support_paths.hpp"

using namespace stereodecomp;

namespace {

Grid constant_grid(int channels, int h, int w, double v) { return Grid(channels, h, w, v); }

}  // namespace

TEST_SUITE("pyramid") {
  TEST_CASE("fit_input pads to the next multiple of scale^levels") {
    PyramidConfig config;
    config.levels = 3;
    config.scale = 2;
    config.reference_disparities = 4;
    const auto fitted = fit_input(constant_grid(1, 100, 100, 0.5), config);
    CHECK(fitted.image.height == 104);
    CHECK(fitted.image.width == 104);
    CHECK(config.reference_height == 13);
    CHECK(config.reference_width == 13);
    CHECK(fitted.original_height == 100);

    PyramidConfig config2 = config;
    const auto exact = fit_input(constant_grid(1, 96, 96, 0.5), config2);
    CHECK(exact.image.height == 96);
    CHECK(exact.image.width == 96);
    CHECK(config2.reference_width == 12);
  }

  TEST_CASE("fit_input converts RGB to luminance") {
    Grid rgb(3, 8, 8);
    for (int r = 0; r < 8; ++r)
      for (int w = 0; w < 8; ++w) {
        rgb.at(0, r, w) = 60.0;
        rgb.at(1, r, w) = 120.0;
        rgb.at(2, r, w) = 180.0;
      }
    PyramidConfig config;
    config.levels = 3;
    config.scale = 2;
    config.reference_disparities = 1;
    const auto fitted = fit_input(rgb, config);
    for (double v : fitted.image.data) CHECK(v == doctest::Approx(108.9).epsilon(1e-12));
  }

  TEST_CASE("fit_input rejects zero-area and odd channel counts") {
    CHECK_THROWS_AS(Grid(1, 0, 5), InvalidInput);
    PyramidConfig config;
    config.reference_disparities = 1;
    CHECK_THROWS_AS(fit_input(Grid(2, 8, 8, 0.0), config), InvalidInput);
  }

  TEST_CASE("constant image has zero gradients and census") {
    PyramidConfig config;
    config.levels = 2;
    config.scale = 2;
    config.reference_disparities = 1;
    const auto fitted = fit_input(constant_grid(1, 16, 16, 0.7), config);
    const auto features = extract_features(fitted, config);
    REQUIRE(features.size() == 3);
    for (const auto& level : features) {
      // Gradients and census are exactly zero; the normalized intensity only
      // up to the rounding of the window mean.
      for (int r = 0; r < level.height; ++r)
        for (int w = 0; w < level.width; ++w) {
          CHECK(std::abs(level.at(0, r, w)) <= 1e-10);
          for (int ch = 1; ch < level.channels; ++ch) CHECK(level.at(ch, r, w) == 0.0);
        }
    }
    CHECK(features[2].height == fitted.image.height);
    CHECK(features[2].width == fitted.image.width);
  }

  TEST_CASE("vertical step edge localizes the horizontal gradient") {
    const int edge_col = 5;
    Grid image(1, 8, 16);
    for (int r = 0; r < 8; ++r)
      for (int w = 0; w < 16; ++w) image.at(0, r, w) = w >= edge_col ? 1.0 : 0.0;
    PyramidConfig config;
    config.levels = 0;
    config.scale = 2;
    config.reference_disparities = 1;
    const auto features = extract_features(fit_input(image, config), config);
    const Grid& f = features[0];
    for (int r = 0; r < 8; ++r)
      for (int w = 0; w < 16; ++w) {
        const bool on_edge = w == edge_col - 1 || w == edge_col;
        if (on_edge)
          CHECK(f.at(1, r, w) == doctest::Approx(0.5));
        else
          CHECK(f.at(1, r, w) == 0.0);
      }
  }

  TEST_CASE("upsample_features matches the corner-aligned formula") {
    Grid tiny(1, 1, 2);
    tiny.at(0, 0, 0) = 0.0;
    tiny.at(0, 0, 1) = 1.0;
    const Grid up = upsample_features(tiny, 2);
    REQUIRE(up.width == 4);
    CHECK(up.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(up.at(0, 0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(up.at(0, 0, 2) == doctest::Approx(2.0 / 3.0));
    CHECK(up.at(0, 0, 3) == doctest::Approx(1.0));

    const Grid c = constant_grid(2, 3, 5, 1.25);
    const Grid up_c = upsample_features(c, 3);
    CHECK(up_c.height == 9);
    CHECK(up_c.width == 15);
    for (double v : up_c.data) CHECK(v == doctest::Approx(1.25));
    const Grid back = area_downsample(up_c, 3);
    for (double v : back.data) CHECK(v == doctest::Approx(1.25));
  }

  TEST_CASE("dimension chain holds for random configs") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      PyramidConfig config;
      config.levels = 1 + trial % 3;
      config.scale = 2 + trial % 2;
      config.reference_disparities = 2;
      const int block = PyramidConfig::ipow(config.scale, config.levels);
      std::uniform_int_distribution<int> size(block, 3 * block);
      Grid image(1, size(rng), size(rng));
      std::uniform_real_distribution<double> value(0.0, 1.0);
      for (auto& v : image.data) v = value(rng);
      const auto features = extract_features(fit_input(image, config), config);
      for (int l = 1; l <= config.levels; ++l) {
        CHECK(features[l].height == config.scale * features[l - 1].height);
        CHECK(features[l].width == config.scale * features[l - 1].width);
      }
    }
  }

  TEST_CASE("features are bit-identical across thread counts") {
    std::mt19937 rng(11);
    Grid image(1, 32, 32);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (auto& v : image.data) v = value(rng);
    PyramidConfig config;
    config.levels = 2;
    config.scale = 2;
    config.reference_disparities = 2;

    test_support::ScopedEnv env("STEREO_DECOMP_THREADS", "1");
    const auto serial = extract_features(fit_input(image, config), config);
    env.set("4");
    const auto threaded = extract_features(fit_input(image, config), config);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t l = 0; l < serial.size(); ++l) CHECK(serial[l].data == threaded[l].data);
  }

  TEST_CASE("single-pixel change stays within the normalization radius") {
    std::mt19937 rng(3);
    Grid image(1, 32, 32);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (auto& v : image.data) v = value(rng);
    PyramidConfig config;
    config.levels = 2;
    config.scale = 2;
    config.reference_disparities = 2;
    const auto base = extract_features(fit_input(image, config), config);

    Grid poked = image;
    const int pr = 17, pc = 9;
    poked.at(0, pr, pc) += 0.5;
    PyramidConfig config2 = config;
    const auto changed = extract_features(fit_input(poked, config2), config2);

    for (int l = 0; l <= config.levels; ++l) {
      const int shift = PyramidConfig::ipow(config.scale, config.levels - l);
      const int cr = pr / shift, cc = pc / shift;
      for (int ch = 0; ch < base[l].channels; ++ch)
        for (int r = 0; r < base[l].height; ++r)
          for (int w = 0; w < base[l].width; ++w) {
            if (base[l].at(ch, r, w) != changed[l].at(ch, r, w)) {
              CHECK(std::abs(r - cr) <= 4);
              CHECK(std::abs(w - cc) <= 4);
            }
          }
    }
  }
}
