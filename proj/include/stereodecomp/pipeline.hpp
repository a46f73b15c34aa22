#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stereodecomp/complexity.hpp"
#include "stereodecomp/dense_match.hpp"
#include "stereodecomp/detail_detect.hpp"
#include "stereodecomp/fusion.hpp"
#include "stereodecomp/pyramid.hpp"
#include "stereodecomp/scene.hpp"
#include "stereodecomp/sparse_match.hpp"

namespace stereodecomp {

enum class FusionMode { kSoft, kHard, kOff };

// Per-level switches for the fusion stage (ablation runs override them).
struct LevelToggles {
  bool guidance = true;
  bool fusion = true;
  bool refinement = true;
};

struct PipelineConfig {
  int levels = 3;
  int scale = 2;
  int max_disparity = 64;  // at input resolution; the reference level gets ceil(/s^L)
  int feature_channels = 11;
  double alpha = 0.0;  // detail selection weight; <= 0 picks the per-level default
  double sigma_v = 1.0;
  double tau_lrc = 1.0;
  int refine_radius = 2;
  int aggregation_radius = 2;
  double rematch_min_gap = 0.25;  // refinement acts only above this score gap
  FusionMode fusion = FusionMode::kSoft;
  bool refinement = true;
  bool guidance = true;
  bool bidirectional = true;
  double condition_constant = 1.0;  // C for the ledger's sparsity verdicts
  // When sized levels, overrides the global flags per level (1-based level l
  // maps to index l-1).
  std::vector<LevelToggles> level_toggles;

  void validate() const;
  LevelToggles toggles_for(int level) const;
};

struct LevelOutputs {
  int level = 0;
  FineMask left_mask;
  FineMask right_mask;
  SparseField field;        // left-view sparse matches
  DisparityMap upsampled;   // dense map carried up from the previous level
  DisparityMap fused;
  DisparityMap refined;
  Grid soft_mask;           // empty for hard/off fusion
  BoolMask occlusion;       // LR-check verdict used for the gating
};

struct PipelineResult {
  DisparityMap final;            // cropped to the input size, input-pixel units
  DisparityMap dense_reference;  // reference-level dense regression
  Grid dense_variance;
  std::vector<LevelOutputs> levels;  // levels 1..L
  ComplexityLedger ledger;
  int original_height = 0;
  int original_width = 0;
};

PipelineResult run(const Grid& left, const Grid& right, const PipelineConfig& config);

// Cumulative component sweep over a scene list: the baseline row disables
// guidance, fusion and refinement everywhere, then the three switches are
// enabled level by level.
struct AblationRow {
  std::string label;
  std::vector<LevelToggles> toggles;
  double mean_epe = 0.0;
};

std::vector<AblationRow> ablate(const std::vector<Scene>& scenes, const PipelineConfig& base);
std::string ablation_csv(const std::vector<AblationRow>& rows, int levels);

// Growth-curve experiment: the base scene is resized to each resolution
// (content, disparity range and dot size scale together), the reference
// resolution stays fixed, and the level count grows with the input.
struct GrowthSweepConfig {
  int reference_size = 32;    // reference-level height/width
  int disparity_divisor = 8;  // max disparity = resolution / divisor
};

std::vector<GrowthRow> growth_sweep(const std::vector<int>& resolutions,
                                    const SceneSpec& base_spec, const PipelineConfig& base,
                                    const GrowthSweepConfig& sweep = {});

// Default sweep content: tilted background plus two floating squares.
SceneSpec default_growth_scene();

}  // namespace stereodecomp
