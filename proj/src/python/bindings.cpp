#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stereodecomp/image_io.hpp"
#include "stereodecomp/metrics.hpp"
#include "stereodecomp/pipeline.hpp"

namespace py = pybind11;
using namespace stereodecomp;

namespace {

Grid grid_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() == 2) {
    Grid g(1, static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + g.size(), g.data.begin());
    return g;
  }
  if (arr.ndim() == 3) {
    Grid g(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
           static_cast<int>(arr.shape(2)));
    std::copy(arr.data(), arr.data() + g.size(), g.data.begin());
    return g;
  }
  throw InvalidInput("expected a (H, W) or (C, H, W) array");
}

py::array_t<double> array_from_grid(const Grid& g) {
  if (g.channels == 1) {
    py::array_t<double> arr({g.height, g.width});
    std::copy(g.data.begin(), g.data.end(), arr.mutable_data());
    return arr;
  }
  py::array_t<double> arr({g.channels, g.height, g.width});
  std::copy(g.data.begin(), g.data.end(), arr.mutable_data());
  return arr;
}

py::array_t<bool> array_from_mask(const BoolMask& m) {
  py::array_t<bool> arr({m.height, m.width});
  for (std::size_t i = 0; i < m.data.size(); ++i) arr.mutable_data()[i] = m.data[i] != 0;
  return arr;
}

DisparityMap map_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  const Grid g = grid_from_array(arr);
  if (g.channels != 1) throw InvalidInput("disparity maps are single-channel");
  DisparityMap map(g.height, g.width);
  map.values = g;
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) map.valid.set(r, c, std::isfinite(g.at(0, r, c)));
  return map;
}

PipelineConfig config_from_kwargs(const py::kwargs& kwargs) {
  PipelineConfig config;
  for (const auto& item : kwargs) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "levels") config.levels = py::cast<int>(item.second);
    else if (key == "scale") config.scale = py::cast<int>(item.second);
    else if (key == "max_disparity") config.max_disparity = py::cast<int>(item.second);
    else if (key == "feature_channels") config.feature_channels = py::cast<int>(item.second);
    else if (key == "alpha") config.alpha = py::cast<double>(item.second);
    else if (key == "sigma_v") config.sigma_v = py::cast<double>(item.second);
    else if (key == "tau_lrc") config.tau_lrc = py::cast<double>(item.second);
    else if (key == "refine_radius") config.refine_radius = py::cast<int>(item.second);
    else if (key == "agg_radius") config.aggregation_radius = py::cast<int>(item.second);
    else if (key == "rematch_min_gap") config.rematch_min_gap = py::cast<double>(item.second);
    else if (key == "refine") config.refinement = py::cast<bool>(item.second);
    else if (key == "guidance") config.guidance = py::cast<bool>(item.second);
    else if (key == "bidirectional") config.bidirectional = py::cast<bool>(item.second);
    else if (key == "fusion") {
      const std::string mode = py::cast<std::string>(item.second);
      if (mode == "soft") config.fusion = FusionMode::kSoft;
      else if (mode == "hard") config.fusion = FusionMode::kHard;
      else if (mode == "off") config.fusion = FusionMode::kOff;
      else throw InvalidConfig("fusion must be soft/hard/off");
    } else {
      throw InvalidConfig("unknown configuration key '" + key + "'");
    }
  }
  return config;
}

SceneSpec spec_from_dict(const py::dict& d) {
  SceneSpec spec;
  spec.layers.clear();
  for (const auto& item : d) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "width") spec.width = py::cast<int>(item.second);
    else if (key == "height") spec.height = py::cast<int>(item.second);
    else if (key == "density") spec.dot_density = py::cast<double>(item.second);
    else if (key == "dot_size") spec.dot_size = py::cast<int>(item.second);
    else if (key == "profile") {
      const std::string profile = py::cast<std::string>(item.second);
      if (profile == "dots") spec.dot_profile = DotProfile::kDots;
      else if (profile == "lattice") spec.dot_profile = DotProfile::kLattice;
      else if (profile == "smooth") spec.dot_profile = DotProfile::kSmooth;
      else throw InvalidConfig("profile must be dots, lattice or smooth");
    }
    else if (key == "noise") spec.noise_sigma = py::cast<double>(item.second);
    else if (key == "seed") spec.seed = py::cast<std::uint64_t>(item.second);
    else if (key == "layers") {
      for (const auto& entry : py::cast<py::list>(item.second)) {
        const py::dict layer_dict = py::cast<py::dict>(entry);
        SceneLayer layer;
        if (layer_dict.contains("rect")) {
          const auto rect = py::cast<std::vector<int>>(layer_dict["rect"]);
          if (rect.size() != 4) throw InvalidConfig("rect expects [x, y, w, h]");
          layer.full_frame = false;
          layer.x = rect[0];
          layer.y = rect[1];
          layer.w = rect[2];
          layer.h = rect[3];
        }
        if (layer_dict.contains("brightness"))
          layer.brightness = py::cast<double>(layer_dict["brightness"]);
        const auto plane = py::cast<std::vector<double>>(layer_dict["plane"]);
        if (plane.size() != 3) throw InvalidConfig("plane expects [a, b, c]");
        layer.plane_a = plane[0];
        layer.plane_b = plane[1];
        layer.plane_c = plane[2];
        spec.layers.push_back(layer);
      }
    } else {
      throw InvalidConfig("unknown scene key '" + key + "'");
    }
  }
  return spec;
}

py::dict ledger_to_dict(const ComplexityLedger& ledger) {
  py::dict out;
  py::list levels;
  for (const auto& l : ledger.levels) {
    py::dict row;
    row["level"] = l.level;
    row["width"] = l.width;
    row["height"] = l.height;
    row["disparities"] = l.disparities;
    row["exhaustive"] = l.exhaustive;
    row["detail_fraction"] = l.detail_fraction;
    row["decomposed"] = l.decomposed;
    row["measured"] = l.measured;
    row["measured_right"] = l.measured_right;
    row["condition_ok"] = l.condition_ok;
    row["wallclock_ms"] = l.wallclock_ms;
    levels.append(row);
  }
  out["levels"] = levels;
  out["exhaustive_total"] = ledger.exhaustive_total;
  out["decomposed_total"] = ledger.decomposed_total;
  out["measured_total"] = ledger.measured_total;
  out["measured_right_total"] = ledger.measured_right_total;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "decomposed stereo matching core";

  py::register_exception<InvalidInput>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<InvalidConfig>(m, "InvalidConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatErrorException", PyExc_IOError);

  m.def(
      "match",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> left,
         py::array_t<double, py::array::c_style | py::array::forcecast> right,
         const py::kwargs& kwargs) {
        const auto result = run(grid_from_array(left), grid_from_array(right),
                                config_from_kwargs(kwargs));
        py::dict out;
        out["disparity"] = array_from_grid(result.final.values);
        out["dense_reference"] = array_from_grid(result.dense_reference.values);
        out["ledger"] = ledger_to_dict(result.ledger);
        py::list masks;
        for (const auto& level : result.levels) masks.append(array_from_mask(level.left_mask.mask));
        out["fine_masks"] = masks;
        return out;
      },
      py::arg("left"), py::arg("right"),
      "Run the decomposition pipeline on a rectified pair; returns the final "
      "disparity map, the reference-level dense map, the per-level detail "
      "masks and the complexity ledger.");

  m.def(
      "detect_details",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> image,
         const py::kwargs& kwargs) {
        const PipelineConfig config = config_from_kwargs(kwargs);
        PyramidConfig pyramid;
        pyramid.levels = config.levels;
        pyramid.scale = config.scale;
        pyramid.feature_channels = config.feature_channels;
        pyramid.reference_disparities = 1;
        const auto fitted = fit_input(grid_from_array(image), pyramid);
        const auto features = extract_features(fitted, pyramid);
        py::list out;
        for (int l = 1; l <= config.levels; ++l) {
          const Grid up = upsample_features(features[l - 1], config.scale);
          const Grid energy = pool_energy(diff_energy(features[l], up), 2);
          const double alpha = config.alpha > 0.0 ? config.alpha : default_alpha(energy);
          const auto sel = select_fine_grained(energy, alpha, l);
          py::dict level;
          level["level"] = l;
          level["alpha"] = alpha;
          level["energy"] = array_from_grid(energy);
          level["mask"] = array_from_mask(sel.mask.mask);
          level["objective"] = sel.objective;
          out.append(level);
        }
        return out;
      },
      py::arg("image"),
      "Per-level detail-loss energy and the selected fine-grained masks.");

  m.def(
      "generate_scene",
      [](const py::dict& spec) {
        const Scene scene = generate_scene(spec_from_dict(spec));
        py::dict out;
        out["left"] = array_from_grid(scene.left);
        out["right"] = array_from_grid(scene.right);
        out["gt_left"] = array_from_grid(scene.gt_left.values);
        out["gt_right"] = array_from_grid(scene.gt_right.values);
        out["occlusion"] = array_from_mask(scene.occlusion);
        return out;
      },
      py::arg("spec"), "Render a random-dot stereo scene with exact ground truth.");

  m.def(
      "evaluate",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> pred,
         py::array_t<double, py::array::c_style | py::array::forcecast> gt,
         py::object region) {
        const DisparityMap p = map_from_array(pred);
        const DisparityMap g = map_from_array(gt);
        BoolMask mask(g.height(), g.width(), true);
        if (!region.is_none()) {
          const auto arr =
              py::cast<py::array_t<bool, py::array::c_style | py::array::forcecast>>(region);
          if (arr.ndim() != 2 || arr.shape(0) != g.height() || arr.shape(1) != g.width())
            throw InvalidInput("region mask shape mismatch");
          for (std::size_t i = 0; i < mask.data.size(); ++i) mask.data[i] = arr.data()[i];
        }
        const EvalResult result = evaluate(p, g, mask);
        py::dict out;
        out["epe"] = result.epe;
        out["rms"] = result.rms;
        out["d1"] = result.d1;
        py::dict bad;
        for (const auto& [tau, fraction] : result.bad) bad[py::float_(tau)] = fraction;
        out["bad"] = bad;
        py::dict quantiles;
        for (const auto& [pct, value] : result.quantiles) quantiles[py::int_(pct)] = value;
        out["quantiles"] = quantiles;
        out["pixels"] = result.pixel_count;
        return out;
      },
      py::arg("pred"), py::arg("gt"), py::arg("region") = py::none(),
      "Disparity error metrics (EPE, bad-tau, D1, RMS, error quantiles).");

  m.def(
      "gradcheck",
      [](std::uint64_t seed, int height, int width, int disparities) {
        return stereodecomp::gradcheck(seed, height, width, disparities).max_rel_error();
      },
      py::arg("seed") = 0, py::arg("height") = 8, py::arg("width") = 8,
      py::arg("disparities") = 4,
      "Max relative error of the analytic sparse-matching gradients against "
      "central finite differences.");

  m.def(
      "exhaustive_total",
      [](std::uint64_t width, std::uint64_t height, std::uint64_t disparities, int scale,
         int levels) {
        const auto totals = exhaustive_total(width, height, disparities, scale, levels);
        py::dict out;
        out["per_level"] = totals.per_level;
        out["total"] = totals.total;
        out["closed_form"] = totals.closed_form;
        out["bound"] = totals.bound;
        out["bound_holds"] = totals.bound_holds;
        return out;
      },
      py::arg("width"), py::arg("height"), py::arg("disparities"), py::arg("scale"),
      py::arg("levels"), "Exhaustive search-space size over the level stack.");

  m.def("read_pfm", [](const std::string& path) { return array_from_grid(read_pfm(path).values); },
        py::arg("path"));
  m.def(
      "write_pfm",
      [](const std::string& path,
         py::array_t<double, py::array::c_style | py::array::forcecast> map) {
        write_pfm(path, map_from_array(map));
      },
      py::arg("path"), py::arg("map"));
}
