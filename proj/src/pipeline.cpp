#include "stereodecomp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <tuple>

#include "stereodecomp/metrics.hpp"

namespace stereodecomp {

namespace {

// Detail evidence is pooled over this radius before selection so masks
// cover lost structures contiguously in both views.
constexpr int kDetailPoolRadius = 2;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

DisparityMap crop(const DisparityMap& map, int height, int width) {
  if (map.height() == height && map.width() == width) return map;
  DisparityMap out(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      out.at(r, c) = map.at(r, c);
      out.valid.set(r, c, map.valid.at(r, c));
    }
  return out;
}

FineMask flip_mask(const FineMask& m) {
  FineMask out;
  out.level = m.level;
  out.mask = flip_horizontal(m.mask);
  out.selected = m.selected;
  out.row_counts = m.row_counts;  // per-row counts are flip-invariant
  return out;
}

SparseField unflip_field(const SparseField& field, int width) {
  SparseField out;
  out.level = field.level;
  out.disparities = field.disparities;
  out.score_evaluations = field.score_evaluations;
  out.entries.reserve(field.entries.size());
  for (auto e : field.entries) {
    e.col = width - 1 - e.col;
    out.entries.push_back(e);
  }
  // Mirroring reverses the column order within each row; restore it.
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= out.entries.size(); ++i) {
    if (i == out.entries.size() || out.entries[i].row != out.entries[begin].row) {
      std::reverse(out.entries.begin() + begin, out.entries.begin() + i);
      begin = i;
    }
  }
  return out;
}

struct ViewState {
  std::vector<Grid> features;       // per level
  std::vector<FineMask> masks;      // per level 1..L (index l-1)
  DisparityMap current;             // fused map carried across levels
};

}  // namespace

void PipelineConfig::validate() const {
  if (levels < 0) throw InvalidConfig("levels must be >= 0");
  if (scale < 2) throw InvalidConfig("scale must be >= 2");
  if (max_disparity < 1) throw InvalidConfig("max_disparity must be >= 1");
  if (feature_channels < 3 || feature_channels > 11)
    throw InvalidConfig("feature_channels must be in [3, 11]");
  if (!(sigma_v > 0.0)) throw InvalidConfig("sigma_v must be positive");
  if (!(tau_lrc > 0.0)) throw InvalidConfig("tau_lrc must be positive");
  if (refine_radius < 0) throw InvalidConfig("refine_radius must be >= 0");
  if (aggregation_radius < 0) throw InvalidConfig("aggregation_radius must be >= 0");
  if (!level_toggles.empty() && static_cast<int>(level_toggles.size()) != levels)
    throw InvalidConfig("level_toggles must cover every level above the reference");
}

LevelToggles PipelineConfig::toggles_for(int level) const {
  if (!level_toggles.empty()) return level_toggles[level - 1];
  return LevelToggles{guidance, fusion != FusionMode::kOff, refinement};
}

PipelineResult run(const Grid& left, const Grid& right, const PipelineConfig& config) {
  config.validate();
  if (left.height != right.height || left.width != right.width)
    throw InvalidInput("left/right images differ in size");
  const int block = PyramidConfig::ipow(config.scale, config.levels);
  if (left.height < block || left.width < block)
    throw InvalidInput("image smaller than scale^levels");

  PyramidConfig pyramid;
  pyramid.levels = config.levels;
  pyramid.scale = config.scale;
  pyramid.feature_channels = config.feature_channels;
  pyramid.reference_disparities = (config.max_disparity + block - 1) / block;

  auto level_start = Clock::now();

  PipelineResult result;
  const FittedImage fitted_left = fit_input(left, pyramid);
  const FittedImage fitted_right = fit_input(right, pyramid);
  result.original_height = fitted_left.original_height;
  result.original_width = fitted_left.original_width;
  if (pyramid.reference_disparities > pyramid.reference_width)
    throw InvalidConfig("disparity range exceeds the reference width");

  ViewState lv, rv;
  lv.features = extract_features(fitted_left, pyramid);
  rv.features = extract_features(fitted_right, pyramid);

  // Detail masks for both views at every level above the reference.
  for (auto* view : {&lv, &rv}) {
    for (int l = 1; l <= config.levels; ++l) {
      const Grid up = upsample_features(view->features[l - 1], config.scale);
      const Grid energy = pool_energy(diff_energy(view->features[l], up), kDetailPoolRadius);
      const double alpha = config.alpha > 0.0 ? config.alpha : default_alpha(energy);
      view->masks.push_back(select_fine_grained(energy, alpha, l).mask);
    }
  }

  // Dense matching at the reference level.
  const auto dense_for = [&](const Grid& ref, const Grid& other) {
    CostVolume cv = build_cost_volume(ref, other, pyramid.reference_disparities);
    const std::uint64_t evaluations = cv.score_evaluations;
    cv = aggregate_costs(cv, config.aggregation_radius);
    cv = aggregate_costs(cv, config.aggregation_radius);
    auto reg = softargmax_regress(cv);
    return std::tuple{std::move(reg), evaluations};
  };

  auto [dense_left, dense_evals] = dense_for(lv.features[0], rv.features[0]);
  lv.current = dense_left.disparity;
  result.dense_reference = dense_left.disparity;
  result.dense_variance = dense_left.variance;

  std::uint64_t dense_evals_right = 0;
  if (config.bidirectional) {
    auto [dense_right, evals] =
        dense_for(flip_horizontal(rv.features[0]), flip_horizontal(lv.features[0]));
    rv.current = flip_horizontal(dense_right.disparity);
    dense_evals_right = evals;
  }

  result.ledger.scale = config.scale;
  result.ledger.condition_constant = config.condition_constant;
  {
    ComplexityLevel row;
    row.level = 0;
    row.width = pyramid.reference_width;
    row.height = pyramid.reference_height;
    row.disparities = pyramid.reference_disparities;
    row.exhaustive = row.width * row.height * row.disparities;
    row.decomposed = static_cast<double>(row.exhaustive);
    row.measured = dense_evals;
    row.measured_right = dense_evals_right;
    row.wallclock_ms = ms_since(level_start);
    result.ledger.levels.push_back(row);
  }

  for (int l = 1; l <= config.levels; ++l) {
    level_start = Clock::now();
    const LevelToggles toggles = config.toggles_for(l);
    const int disparities = pyramid.level_disparities(l);

    LevelOutputs out;
    out.level = l;
    out.left_mask = lv.masks[l - 1];
    out.right_mask = rv.masks[l - 1];

    out.upsampled =
        upsample_disparity(lv.current, lv.features[l], config.scale, toggles.guidance);
    DisparityMap up_right;
    if (config.bidirectional) {
      up_right =
          upsample_disparity(rv.current, rv.features[l], config.scale, toggles.guidance);
      out.occlusion = occlusion_from_lr(out.upsampled, up_right, config.tau_lrc);
    } else {
      out.occlusion = BoolMask(out.upsampled.height(), out.upsampled.width());
    }

    out.field =
        sparse_forward(lv.features[l], rv.features[l], out.left_mask, out.right_mask, disparities);

    SparseField field_right;
    if (config.bidirectional) {
      field_right = unflip_field(
          sparse_forward(flip_horizontal(rv.features[l]), flip_horizontal(lv.features[l]),
                         flip_mask(out.right_mask), flip_mask(out.left_mask), disparities),
          out.upsampled.width());
    }

    const auto fuse_view = [&](const DisparityMap& upsampled, const SparseField& field,
                               const FineMask& mask, const BoolMask& occlusion,
                               Grid* mask_out) -> DisparityMap {
      if (!toggles.fusion) return upsampled;
      if (config.fusion == FusionMode::kHard) return hard_fuse(upsampled, field);
      const Grid m = soft_mask(field, mask, occlusion, config.sigma_v);
      if (mask_out) *mask_out = m;
      return soft_fuse(upsampled, field, m);
    };

    out.fused = fuse_view(out.upsampled, out.field, out.left_mask, out.occlusion, &out.soft_mask);
    std::uint64_t refine_taps = 0;
    if (toggles.refinement) {
      out.refined = refine_rematch(out.fused, lv.features[l], rv.features[l], disparities,
                                   out.occlusion, config.rematch_min_gap, &refine_taps);
      out.refined = refine(out.refined, lv.features[l], config.refine_radius);
    } else {
      out.refined = out.fused;
    }
    lv.current = out.refined;

    if (config.bidirectional) {
      BoolMask occl_right = occlusion_from_lr(flip_horizontal(up_right),
                                              flip_horizontal(out.upsampled), config.tau_lrc);
      occl_right = flip_horizontal(occl_right);
      DisparityMap fused_right =
          fuse_view(up_right, field_right, out.right_mask, occl_right, nullptr);
      if (toggles.refinement) {
        // The right view scores its candidates in mirrored coordinates.
        DisparityMap rematched = flip_horizontal(refine_rematch(
            flip_horizontal(fused_right), flip_horizontal(rv.features[l]),
            flip_horizontal(lv.features[l]), disparities, flip_horizontal(occl_right),
            config.rematch_min_gap, &refine_taps));
        rv.current = refine(rematched, rv.features[l], config.refine_radius);
      } else {
        rv.current = fused_right;
      }
    }

    ComplexityLevel row;
    row.level = l;
    row.width = pyramid.level_width(l);
    row.height = pyramid.level_height(l);
    row.disparities = disparities;
    row.exhaustive = row.width * row.height * row.disparities;
    row.detail_fraction = sparsity_stats(out.left_mask).global_fraction;
    row.decomposed = static_cast<double>(row.exhaustive) * row.detail_fraction *
                     row.detail_fraction;
    row.measured = out.field.score_evaluations;
    row.measured_right = field_right.score_evaluations;
    row.refinement_evaluations = refine_taps;
    row.condition_ok = row.detail_fraction <=
                       condition_threshold(config.scale, l, config.condition_constant);
    row.wallclock_ms = ms_since(level_start);
    result.ledger.levels.push_back(row);

    result.levels.push_back(std::move(out));
  }

  result.ledger.finalize();
  result.final = crop(lv.current, result.original_height, result.original_width);
  return result;
}

std::vector<AblationRow> ablate(const std::vector<Scene>& scenes, const PipelineConfig& base) {
  if (scenes.empty()) throw InvalidInput("ablation needs at least one scene");
  std::vector<AblationRow> rows;
  std::vector<LevelToggles> toggles(base.levels, LevelToggles{false, false, false});

  const auto push_row = [&](const std::string& label) {
    PipelineConfig config = base;
    config.level_toggles = toggles;
    double epe_sum = 0.0;
    for (const auto& scene : scenes) {
      const auto result = run(scene.left, scene.right, config);
      const BoolMask all(scene.gt_left.height(), scene.gt_left.width(), true);
      epe_sum += evaluate(result.final, scene.gt_left, all).epe;
    }
    rows.push_back({label, toggles, epe_sum / scenes.size()});
  };

  push_row("baseline");
  for (int l = 1; l <= base.levels; ++l) {
    toggles[l - 1].guidance = true;
    push_row("guidance_l" + std::to_string(l));
    toggles[l - 1].fusion = true;
    push_row("fusion_l" + std::to_string(l));
    toggles[l - 1].refinement = true;
    push_row("refinement_l" + std::to_string(l));
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows, int levels) {
  std::ostringstream csv;
  csv << "step";
  for (int l = 1; l <= levels; ++l)
    csv << ",guidance_l" << l << ",fusion_l" << l << ",refinement_l" << l;
  csv << ",epe\n";
  for (const auto& row : rows) {
    csv << row.label;
    for (const auto& t : row.toggles)
      csv << ',' << (t.guidance ? 1 : 0) << ',' << (t.fusion ? 1 : 0) << ','
          << (t.refinement ? 1 : 0);
    csv.precision(6);
    csv << ',' << std::fixed << row.mean_epe << '\n';
    csv.unsetf(std::ios::fixed);
  }
  return csv.str();
}

SceneSpec default_growth_scene() {
  SceneSpec spec;
  spec.width = 128;
  spec.height = 128;
  spec.dot_size = 4;
  spec.dot_density = 0.5;
  spec.noise_sigma = 0.0;
  spec.seed = 17;
  SceneLayer square1;
  square1.full_frame = false;
  square1.x = 24;
  square1.y = 20;
  square1.w = 40;
  square1.h = 44;
  square1.plane_a = 0.01;
  square1.plane_b = 0.0;
  square1.plane_c = 12.0;
  SceneLayer square2;
  square2.full_frame = false;
  square2.x = 76;
  square2.y = 64;
  square2.w = 36;
  square2.h = 40;
  square2.plane_a = 0.0;
  square2.plane_b = 0.01;
  square2.plane_c = 9.0;
  SceneLayer ground;
  ground.plane_a = 0.015;
  ground.plane_b = 0.0;
  ground.plane_c = 3.0;
  spec.layers = {square1, square2, ground};
  return spec;
}

std::vector<GrowthRow> growth_sweep(const std::vector<int>& resolutions,
                                    const SceneSpec& base_spec, const PipelineConfig& base,
                                    const GrowthSweepConfig& sweep) {
  std::vector<GrowthRow> rows;
  for (int resolution : resolutions) {
    if (resolution < base_spec.width || resolution % base_spec.width != 0)
      throw InvalidConfig("sweep resolutions must be multiples of the base scene size");
    const SceneSpec spec = base_spec.scaled(resolution / base_spec.width);
    const Scene scene = generate_scene(spec);

    PipelineConfig config = base;
    config.levels = 0;
    for (int size = sweep.reference_size; size < resolution; size *= config.scale)
      ++config.levels;
    config.max_disparity = std::max(1, resolution / sweep.disparity_divisor);

    const auto result = run(scene.left, scene.right, config);
    for (const auto& level : result.ledger.levels) {
      GrowthRow row;
      row.resolution = resolution;
      row.level = level.level;
      row.exhaustive = level.exhaustive;
      row.decomposed = level.decomposed;
      row.measured = level.measured + level.measured_right;
      row.wallclock_ms = level.wallclock_ms;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace stereodecomp
