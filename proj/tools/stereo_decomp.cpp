#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stereodecomp/image_io.hpp"
#include "stereodecomp/metrics.hpp"
#include "stereodecomp/pipeline.hpp"
#include "stereodecomp/run_config.hpp"

namespace fs = std::filesystem;
using namespace stereodecomp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitFormat = 2;

void dump_intermediates(const PipelineResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  write_pfm((dir / "dense_reference.pfm").string(), result.dense_reference);
  std::ofstream ledger(dir / "ledger.txt", std::ios::binary);
  ledger << ledger_text(result.ledger);
  for (const auto& level : result.levels) {
    const std::string tag = "_l" + std::to_string(level.level);
    write_pfm((dir / ("upsampled" + tag + ".pfm")).string(), level.upsampled);
    write_pfm((dir / ("fused" + tag + ".pfm")).string(), level.fused);
    write_pfm((dir / ("refined" + tag + ".pfm")).string(), level.refined);
    write_mask_pgm((dir / ("left_mask" + tag + ".pgm")).string(), level.left_mask.mask);
    write_mask_pgm((dir / ("right_mask" + tag + ".pgm")).string(), level.right_mask.mask);
    write_mask_pgm((dir / ("occlusion" + tag + ".pgm")).string(), level.occlusion);
    std::ofstream sparse(dir / ("sparse" + tag + ".csv"), std::ios::binary);
    sparse << "row,col,disparity,variance,candidates\n";
    for (const auto& e : level.field.entries)
      sparse << e.row << ',' << e.col << ',' << e.disparity << ',' << e.variance << ','
             << e.candidate_count << '\n';
  }
}

Scene load_scene_dir(const fs::path& dir) {
  Scene scene;
  scene.left = read_pgm((dir / "left.pgm").string());
  scene.right = read_pgm((dir / "right.pgm").string());
  scene.gt_left = read_pfm((dir / "gt_left.pfm").string());
  if (fs::exists(dir / "gt_right.pfm"))
    scene.gt_right = read_pfm((dir / "gt_right.pfm").string());
  return scene;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"decomposed stereo matching"};
  app.require_subcommand(1);

  // match
  auto* match = app.add_subcommand("match", "estimate a disparity map");
  std::string left_path, right_path, config_path, out_path = "disparity.pfm", dump_dir;
  match->add_option("left", left_path, "left image (PGM)")->required();
  match->add_option("right", right_path, "right image (PGM)")->required();
  match->add_option("--config", config_path, "run configuration file");
  match->add_option("--out", out_path, "output disparity (PFM)");
  match->add_option("--dump-intermediates", dump_dir, "directory for per-level outputs");

  // eval
  auto* eval = app.add_subcommand("eval", "compare a disparity map with ground truth");
  std::string pred_path, gt_path, gt_right_path, region = "all";
  eval->add_option("pred", pred_path, "predicted disparity (PFM)")->required();
  eval->add_option("gt", gt_path, "ground-truth disparity (PFM)")->required();
  eval->add_option("--region", region, "all or noc")->check(CLI::IsMember({"all", "noc"}));
  eval->add_option("--gt-right", gt_right_path, "right-view ground truth (needed for noc)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic stereo scene");
  std::string spec_path, synth_out;
  synth->add_option("spec", spec_path, "scene spec file")->required();
  synth->add_option("--out", synth_out, "output directory")->required();

  // complexity
  auto* complexity = app.add_subcommand("complexity", "search-space growth curves");
  std::string sweep = "128,256,512,1024";
  std::string sweep_scene;
  bool with_condition_table = false;
  complexity->add_option("--sweep", sweep, "comma-separated resolutions");
  complexity->add_option("--scene", sweep_scene, "base scene spec (file or directory)");
  complexity->add_flag("--condition-table", with_condition_table,
                       "also print Theorem-2 condition verdicts to stderr");

  // gradcheck
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "verify the sparse-matching gradients");
  std::uint64_t seed = 0;
  gradcheck_cmd->add_option("--seed", seed, "RNG seed");

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "component sweep over a scene directory");
  std::string ablate_dir;
  ablate_cmd->add_option("scenes", ablate_dir, "scene directory")->required();
  std::string ablate_config_path;
  ablate_cmd->add_option("--config", ablate_config_path, "run configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (match->parsed()) {
    const PipelineConfig config =
        config_path.empty() ? PipelineConfig{} : parse_run_config_file(config_path);
    const Grid left = read_pgm(left_path);
    const Grid right = read_pgm(right_path);
    const auto result = run(left, right, config);
    write_pfm(out_path, result.final);
    if (!dump_dir.empty()) dump_intermediates(result, dump_dir);
    std::cerr << ledger_text(result.ledger);
    return kExitOk;
  }

  if (eval->parsed()) {
    const DisparityMap pred = read_pfm(pred_path);
    const DisparityMap gt = read_pfm(gt_path);
    BoolMask mask(gt.height(), gt.width(), true);
    if (region == "noc") {
      if (gt_right_path.empty())
        throw InvalidConfig("--region noc requires --gt-right");
      const DisparityMap gt_right = read_pfm(gt_right_path);
      const BoolMask occluded = occlusion_from_lr(gt, gt_right, 1.0);
      for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c) mask.set(r, c, !occluded.at(r, c));
    }
    std::cout << evaluate(pred, gt, mask, region).to_text();
    return kExitOk;
  }

  if (synth->parsed()) {
    const SceneSpec spec = parse_scene_spec_file(spec_path);
    const Scene scene = generate_scene(spec);
    fs::create_directories(synth_out);
    const fs::path dir(synth_out);
    write_pgm((dir / "left.pgm").string(), scene.left);
    write_pgm((dir / "right.pgm").string(), scene.right);
    write_pfm((dir / "gt_left.pfm").string(), scene.gt_left);
    write_pfm((dir / "gt_right.pfm").string(), scene.gt_right);
    write_mask_pgm((dir / "occlusion.pgm").string(), scene.occlusion);
    return kExitOk;
  }

  if (complexity->parsed()) {
    std::vector<int> resolutions;
    std::stringstream ss(sweep);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        resolutions.push_back(std::stoi(token));
      } catch (const std::exception&) {
        throw InvalidConfig("bad resolution '" + token + "' in --sweep");
      }
    }
    if (resolutions.empty()) throw InvalidConfig("--sweep lists no resolutions");
    SceneSpec base = default_growth_scene();
    if (!sweep_scene.empty()) {
      fs::path path(sweep_scene);
      if (fs::is_directory(path)) path /= "spec.cfg";
      base = parse_scene_spec_file(path.string());
    }
    const auto rows = growth_sweep(resolutions, base, PipelineConfig{});
    std::cout << growth_csv(rows);
    if (with_condition_table) {
      // Re-run the largest resolution to report its condition verdicts.
      const SceneSpec spec = base.scaled(resolutions.back() / base.width);
      const Scene scene = generate_scene(spec);
      PipelineConfig config;
      config.levels = 0;
      for (int size = 32; size < resolutions.back(); size *= config.scale) ++config.levels;
      config.max_disparity = std::max(1, resolutions.back() / 8);
      const auto result = run(scene.left, scene.right, config);
      std::cerr << condition_table(result.ledger);
    }
    return kExitOk;
  }

  if (gradcheck_cmd->parsed()) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto report = gradcheck(seed + i, 8 + (i % 9), 8 + ((i * 3) % 9), 4 + (i % 5));
      worst = std::max(worst, report.max_rel_error());
    }
    std::cout << "max_relative_error " << worst << '\n';
    if (worst > 1e-4) {
      std::cerr << "gradient check failed\n";
      return kExitValidation;
    }
    return kExitOk;
  }

  if (ablate_cmd->parsed()) {
    const fs::path dir(ablate_dir);
    std::vector<Scene> scenes;
    if (fs::exists(dir / "left.pgm")) {
      scenes.push_back(load_scene_dir(dir));
    } else if (fs::is_directory(dir)) {
      std::vector<fs::path> subdirs;
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && fs::exists(entry.path() / "left.pgm"))
          subdirs.push_back(entry.path());
      std::sort(subdirs.begin(), subdirs.end());
      for (const auto& sub : subdirs) scenes.push_back(load_scene_dir(sub));
    }
    if (scenes.empty()) throw InvalidInput("no scenes found under " + ablate_dir);
    PipelineConfig config = ablate_config_path.empty()
                                ? PipelineConfig{}
                                : parse_run_config_file(ablate_config_path);
    const auto rows = ablate(scenes, config);
    std::cout << ablation_csv(rows, config.levels);
    return kExitOk;
  }

  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const OverflowError& e) {
    std::cerr << "overflow: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  }
}
