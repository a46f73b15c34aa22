#include <cmath>

#include "doctest.h"
#include "stereodecomp/metrics.hpp"
#include "stereodecomp/pipeline.hpp"
#include "support_paths.hpp"

using namespace stereodecomp;

namespace {

PipelineConfig small_config() {
  PipelineConfig config;
  config.levels = 2;
  config.scale = 2;
  config.max_disparity = 16;
  return config;
}

SceneSpec dotted_spec(std::uint64_t seed, double disparity, int size = 64) {
  SceneSpec spec;
  spec.width = size;
  spec.height = size;
  spec.dot_size = 2;
  spec.dot_density = 0.5;
  spec.seed = seed;
  SceneLayer ground;
  ground.plane_c = disparity;
  spec.layers = {ground};
  return spec;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("identical views regress to zero disparity") {
    const Scene scene = generate_scene(dotted_spec(3, 0.0));
    const auto result = run(scene.left, scene.left, small_config());
    CHECK(result.final.height() == 64);
    CHECK(result.final.width() == 64);
    const BoolMask all(64, 64, true);
    const auto metrics = evaluate(result.final, scene.gt_left, all);
    CHECK(metrics.epe <= 0.25);
    CHECK(result.final.values.all_finite());
  }

  TEST_CASE("results are identical across thread counts") {
    const Scene scene = generate_scene(dotted_spec(5, 6.0));
    test_support::ScopedEnv env("STEREO_DECOMP_THREADS", "1");
    const auto serial = run(scene.left, scene.right, small_config());
    env.set("4");
    const auto threaded = run(scene.left, scene.right, small_config());
    CHECK(serial.final.values.data == threaded.final.values.data);
    CHECK(serial.ledger.measured_total == threaded.ledger.measured_total);
  }

  TEST_CASE("repeat runs are bit-identical") {
    const Scene scene = generate_scene(dotted_spec(6, 4.0));
    const auto a = run(scene.left, scene.right, small_config());
    const auto b = run(scene.left, scene.right, small_config());
    CHECK(a.final.values.data == b.final.values.data);
  }

  TEST_CASE("fusion only touches fine-grained pixels when refinement is off") {
    const Scene scene = generate_scene(dotted_spec(8, 5.0));
    PipelineConfig config = small_config();
    config.refinement = false;
    const auto result = run(scene.left, scene.right, config);
    for (const auto& level : result.levels) {
      REQUIRE(level.refined.values.data == level.fused.values.data);
      for (int r = 0; r < level.fused.height(); ++r)
        for (int c = 0; c < level.fused.width(); ++c)
          if (!level.left_mask.mask.at(r, c))
            CHECK(level.fused.at(r, c) == level.upsampled.at(r, c));
    }
  }

  TEST_CASE("mean disparity scales with the level") {
    SceneSpec spec = dotted_spec(9, 6.0, 128);
    spec.layers[0].plane_a = 0.01;  // gentle tilt keeps the scene smooth
    const Scene scene = generate_scene(spec);
    PipelineConfig config = small_config();
    config.levels = 3;
    config.max_disparity = 16;
    const auto result = run(scene.left, scene.right, config);

    double prev_mean = 0.0;
    for (const auto& v : result.dense_reference.values.data) prev_mean += v;
    prev_mean /= result.dense_reference.values.size();
    for (const auto& level : result.levels) {
      double up_mean = 0.0;
      for (const auto& v : level.upsampled.values.data) up_mean += v;
      up_mean /= level.upsampled.values.size();
      CHECK(up_mean == doctest::Approx(config.scale * prev_mean).epsilon(0.02));
      double refined_mean = 0.0;
      for (const auto& v : level.refined.values.data) refined_mean += v;
      prev_mean = refined_mean / level.refined.values.size();
    }
  }

  TEST_CASE("ledger rows satisfy the accounting identities") {
    const Scene scene = generate_scene(dotted_spec(12, 5.0));
    const auto result = run(scene.left, scene.right, small_config());
    const auto& ledger = result.ledger;
    REQUIRE(ledger.levels.size() == 3);

    std::uint64_t exhaustive_sum = 0;
    double decomposed_sum = 0.0;
    for (const auto& level : ledger.levels) {
      CHECK(level.exhaustive == level.width * level.height * level.disparities);
      if (level.level == 0) {
        CHECK(level.decomposed == double(level.exhaustive));
        CHECK(level.measured ==
              dense_valid_entries(level.width, level.height, level.disparities));
      } else {
        CHECK(level.decomposed ==
              doctest::Approx(double(level.exhaustive) * level.detail_fraction *
                              level.detail_fraction));
        const auto& out = result.levels[level.level - 1];
        std::uint64_t candidates = 0;
        for (const auto& e : out.field.entries) candidates += e.candidate_count;
        CHECK(level.measured == candidates);
        CHECK(level.condition_ok ==
              (level.detail_fraction <=
               condition_threshold(ledger.scale, level.level, ledger.condition_constant)));
      }
      exhaustive_sum += level.exhaustive;
      decomposed_sum += level.decomposed;
    }
    CHECK(ledger.exhaustive_total == exhaustive_sum);
    CHECK(ledger.decomposed_total == doctest::Approx(decomposed_sum));
    CHECK(reconcile(ledger).ok);
  }

  TEST_CASE("bad inputs are rejected") {
    const Scene scene = generate_scene(dotted_spec(2, 0.0));
    CHECK_THROWS_AS(run(scene.left, Grid(1, 32, 64, 0.0), small_config()), InvalidInput);

    PipelineConfig config = small_config();
    config.max_disparity = 6400;
    CHECK_THROWS_AS(run(scene.left, scene.right, config), InvalidConfig);

    PipelineConfig tiny = small_config();
    tiny.levels = 8;
    CHECK_THROWS_AS(run(scene.left, scene.right, tiny), InvalidInput);
  }

  TEST_CASE("ablation produces one row per cumulative step") {
    const Scene scene = generate_scene(dotted_spec(4, 4.0));
    PipelineConfig config = small_config();
    const auto rows = ablate({scene}, config);
    REQUIRE(rows.size() == 1 + 3 * static_cast<std::size_t>(config.levels));
    CHECK(rows.front().label == "baseline");
    CHECK(rows.back().label == "refinement_l2");
    for (const auto& row : rows) CHECK(std::isfinite(row.mean_epe));
    const std::string csv = ablation_csv(rows, config.levels);
    CHECK(csv.rfind("step,guidance_l1,fusion_l1,refinement_l1,guidance_l2", 0) == 0);
  }
}
