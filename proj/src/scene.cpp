#include "stereodecomp/scene.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace stereodecomp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double hash01(std::uint64_t seed, std::uint64_t layer, std::int64_t by, std::int64_t bx,
              std::uint64_t salt) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(layer + 0x51UL));
  h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(by) + 0x9e1UL));
  h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(bx) + 0x3c6UL));
  h = splitmix64(h ^ salt);
  return (h >> 11) * 0x1.0p-53;
}

std::int64_t floor_div(std::int64_t v, int d) { return v >= 0 ? v / d : (v - d + 1) / d; }

// Brightness of one dot-lattice node.
double node_value(const SceneSpec& spec, std::size_t layer, std::int64_t by, std::int64_t bx) {
  const double gate = hash01(spec.seed, layer, by, bx, 1);
  const double value = hash01(spec.seed, layer, by, bx, 2);
  if (gate < spec.dot_density) return 0.35 + 0.65 * value;  // bright dot
  return 0.05 + 0.10 * value;                               // dim background texel
}

// One candidate dot per dot_size cell: jittered center, random extent,
// present with probability dot_density. Irregular placement keeps edges off
// any global grid, so matching hypotheses do not alias.
struct CellDot {
  bool present = false;
  double cx = 0.0, cy = 0.0;  // center, pixels
  double hx = 0.0, hy = 0.0;  // half extents
  double value = 0.0;
  double priority = 0.0;
};

CellDot cell_dot(const SceneSpec& spec, std::size_t layer, std::int64_t cy, std::int64_t cx) {
  CellDot dot;
  dot.present = hash01(spec.seed, layer, cy, cx, 1) < spec.dot_density;
  if (!dot.present) return dot;
  const double g = spec.dot_size;
  dot.cx = (cx + hash01(spec.seed, layer, cy, cx, 3)) * g;
  dot.cy = (cy + hash01(spec.seed, layer, cy, cx, 4)) * g;
  dot.hx = g * (0.30 + 0.25 * hash01(spec.seed, layer, cy, cx, 5));
  dot.hy = g * (0.30 + 0.25 * hash01(spec.seed, layer, cy, cx, 6));
  dot.value = 0.35 + 0.65 * hash01(spec.seed, layer, cy, cx, 2);
  dot.priority = hash01(spec.seed, layer, cy, cx, 7);
  return dot;
}

// Procedural texture value at an integer sample position (infinite domain).
double texture_sample(const SceneSpec& spec, std::size_t layer, std::int64_t row,
                      std::int64_t col) {
  if (spec.dot_profile == DotProfile::kLattice)
    return node_value(spec, layer, floor_div(row, spec.dot_size), floor_div(col, spec.dot_size));

  const std::int64_t cy0 = floor_div(row, spec.dot_size);
  const std::int64_t cx0 = floor_div(col, spec.dot_size);
  double value = 0.08 + 0.04 * hash01(spec.seed, layer, cy0, cx0, 8);
  double best_priority = -1.0;
  for (std::int64_t dy = -1; dy <= 1; ++dy)
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      const CellDot dot = cell_dot(spec, layer, cy0 + dy, cx0 + dx);
      if (!dot.present || dot.priority <= best_priority) continue;
      if (std::abs(col - dot.cx) <= dot.hx && std::abs(row - dot.cy) <= dot.hy) {
        value = dot.value;
        best_priority = dot.priority;
      }
    }
  return value;
}

// Texture at a continuous surface coordinate. Block profile interpolates the
// integer pixel samples along the row (subpixel warps stay well defined);
// smooth profile interpolates the dot lattice itself in both axes.
double texture_at(const SceneSpec& spec, std::size_t layer, int row, double x) {
  if (spec.dot_profile == DotProfile::kSmooth) {
    const double u = x / spec.dot_size - 0.5;
    const double v = static_cast<double>(row) / spec.dot_size - 0.5;
    const double fu = std::floor(u), fv = std::floor(v);
    const std::int64_t bx = static_cast<std::int64_t>(fu);
    const std::int64_t by = static_cast<std::int64_t>(fv);
    const double au = u - fu, av = v - fv;
    const double top = node_value(spec, layer, by, bx) * (1.0 - au) +
                       node_value(spec, layer, by, bx + 1) * au;
    const double bot = node_value(spec, layer, by + 1, bx) * (1.0 - au) +
                       node_value(spec, layer, by + 1, bx + 1) * au;
    return top * (1.0 - av) + bot * av;
  }
  const double fl = std::floor(x);
  const std::int64_t x0 = static_cast<std::int64_t>(fl);
  const double f = x - fl;
  const double a = texture_sample(spec, layer, row, x0);
  if (f == 0.0) return a;
  return a * (1.0 - f) + texture_sample(spec, layer, row, x0 + 1) * f;
}

struct SurfaceHit {
  bool found = false;
  std::size_t layer = 0;
  double surface_x = 0.0;  // left-view column of the surface point
  double disparity = 0.0;
};

// First layer (nearest first) whose surface projects onto right column rx.
// The full-frame background extends horizontally so every right pixel is
// covered by scene content.
SurfaceHit right_view_hit(const SceneSpec& spec, int row, double rx) {
  for (std::size_t k = 0; k < spec.layers.size(); ++k) {
    const auto& layer = spec.layers[k];
    // Solve x - d(row, x) = rx for the surface column x.
    const double denom = 1.0 - layer.plane_a;
    if (denom <= 1e-9) continue;
    const double x = (rx + layer.plane_b * row + layer.plane_c) / denom;
    const double d = layer.disparity(row, x);
    if (d < 0.0) continue;
    const bool inside = layer.full_frame ? (row >= 0 && row < spec.height)
                                         : layer.contains(row, x);
    if (!inside) continue;
    return {true, k, x, d};
  }
  return {};
}

std::size_t left_view_layer(const SceneSpec& spec, int row, int col) {
  for (std::size_t k = 0; k < spec.layers.size(); ++k)
    if (spec.layers[k].contains(row, col)) return k;
  return spec.layers.size() - 1;
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw InvalidConfig("scene dimensions must be positive");
  if (layers.empty()) throw InvalidConfig("scene needs at least one layer");
  if (!layers.back().full_frame) throw InvalidConfig("last layer must be a full-frame background");
  if (!(dot_density > 0.0 && dot_density <= 1.0)) throw InvalidConfig("density must be in (0, 1]");
  if (dot_size < 1) throw InvalidConfig("dot_size must be >= 1");
  if (noise_sigma < 0.0) throw InvalidConfig("noise must be >= 0");
  for (const auto& layer : layers) {
    const double x0 = layer.full_frame ? 0 : layer.x;
    const double x1 = layer.full_frame ? width - 1 : layer.x + layer.w - 1;
    const double y0 = layer.full_frame ? 0 : layer.y;
    const double y1 = layer.full_frame ? height - 1 : layer.y + layer.h - 1;
    for (double row : {y0, y1})
      for (double col : {x0, x1}) {
        const double d = layer.disparity(row, col);
        if (d < 0.0 || d >= width / 4.0)
          throw InvalidConfig("layer disparity out of [0, width/4)");
      }
  }
}

SceneSpec SceneSpec::scaled(int factor) const {
  SceneSpec out = *this;
  out.width *= factor;
  out.height *= factor;
  out.dot_size *= factor;
  for (auto& layer : out.layers) {
    layer.x *= factor;
    layer.y *= factor;
    layer.w *= factor;
    layer.h *= factor;
    layer.plane_c *= factor;  // slopes are unitless, offsets scale with size
  }
  return out;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.left = Grid(1, spec.height, spec.width);
  scene.right = Grid(1, spec.height, spec.width);
  scene.gt_left = DisparityMap(spec.height, spec.width);
  scene.gt_right = DisparityMap(spec.height, spec.width);
  scene.occlusion = BoolMask(spec.height, spec.width);

  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const std::size_t k = left_view_layer(spec, r, c);
      const double d = spec.layers[k].disparity(r, c);
      scene.left.at(0, r, c) =
          spec.layers[k].brightness * texture_at(spec, k, r, static_cast<double>(c));
      scene.gt_left.at(r, c) = d;

      const double rx = c - d;
      const auto hit = right_view_hit(spec, r, rx);
      const bool visible =
          rx >= 0.0 && hit.found && hit.layer == k && std::abs(hit.surface_x - c) < 0.5;
      scene.occlusion.set(r, c, !visible);
    }
    for (int c = 0; c < spec.width; ++c) {
      const auto hit = right_view_hit(spec, r, static_cast<double>(c));
      // The background always resolves, but guard against degenerate specs.
      if (!hit.found) {
        scene.gt_right.valid.set(r, c, false);
        continue;
      }
      scene.right.at(0, r, c) =
          spec.layers[hit.layer].brightness * texture_at(spec, hit.layer, r, hit.surface_x);
      scene.gt_right.at(r, c) = hit.disparity;
    }
  }

  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ 0xa5a5a5a5ULL));
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& v : scene.left.data) v += noise(rng);
    for (auto& v : scene.right.data) v += noise(rng);
  }
  return scene;
}

namespace {

SceneLayer parse_layer(const std::string& body, int line_no) {
  std::istringstream in(body);
  std::string kind;
  in >> kind;
  SceneLayer layer;
  if (kind == "rect") {
    layer.full_frame = false;
    if (!(in >> layer.x >> layer.y >> layer.w >> layer.h))
      throw InvalidConfig("scene spec line " + std::to_string(line_no) + ": bad rect");
  } else if (kind != "background") {
    throw InvalidConfig("scene spec line " + std::to_string(line_no) +
                        ": layer must be 'rect' or 'background'");
  }
  std::string plane;
  if (!(in >> plane) || plane != "plane" ||
      !(in >> layer.plane_a >> layer.plane_b >> layer.plane_c))
    throw InvalidConfig("scene spec line " + std::to_string(line_no) + ": bad plane");
  std::string extra;
  if (in >> extra) {
    if (extra != "bright" || !(in >> layer.brightness))
      throw InvalidConfig("scene spec line " + std::to_string(line_no) + ": bad layer suffix");
  }
  return layer;
}

}  // namespace

SceneSpec parse_scene_spec(std::istream& in) {
  SceneSpec spec;
  spec.layers.clear();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw InvalidConfig("scene spec line " + std::to_string(line_no) + ": expected key = value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    try {
      if (key == "width") spec.width = std::stoi(value);
      else if (key == "height") spec.height = std::stoi(value);
      else if (key == "density") spec.dot_density = std::stod(value);
      else if (key == "dot_size") spec.dot_size = std::stoi(value);
      else if (key == "profile") {
        if (value == "dots") spec.dot_profile = DotProfile::kDots;
        else if (value == "lattice") spec.dot_profile = DotProfile::kLattice;
        else if (value == "smooth") spec.dot_profile = DotProfile::kSmooth;
        else throw InvalidConfig("scene spec line " + std::to_string(line_no) +
                                 ": profile must be dots, lattice or smooth");
      }
      else if (key == "noise") spec.noise_sigma = std::stod(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "layer") spec.layers.push_back(parse_layer(value, line_no));
      else throw InvalidConfig("scene spec line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw InvalidConfig("scene spec line " + std::to_string(line_no) + ": bad value");
    } catch (const std::out_of_range&) {
      throw InvalidConfig("scene spec line " + std::to_string(line_no) + ": value out of range");
    }
  }
  spec.validate();
  return spec;
}

SceneSpec parse_scene_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open scene spec: " + path);
  return parse_scene_spec(in);
}

}  // namespace stereodecomp
