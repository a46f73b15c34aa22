#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// One textured surface: a region in left-view coordinates carrying a planar
// disparity field d(r, c) = a*c + b*r + c0. Layers are listed nearest first.
struct SceneLayer {
  bool full_frame = true;
  int x = 0, y = 0, w = 0, h = 0;  // rectangle when !full_frame
  double plane_a = 0.0, plane_b = 0.0, plane_c = 0.0;
  double brightness = 1.0;  // texture multiplier; thin foreground structures
                            // are usually lighter or darker than their backdrop

  double disparity(double row, double col) const {
    return plane_a * col + plane_b * row + plane_c;
  }
  bool contains(double row, double col) const {
    return full_frame || (col >= x && col < x + w && row >= y && row < y + h);
  }
};

enum class DotProfile {
  kDots,     // jitter-placed rectangular dots, one per dot_size cell (default)
  kLattice,  // hard-edged dot_size blocks on a regular grid
  kSmooth,   // bilinear dot lattice; correlation length ~ dot_size
};

// Random-dot stereogram description. Textures are procedural (seed-hashed
// dot lattices), so both views sample the same surfaces and the ground truth
// is exact.
struct SceneSpec {
  int width = 256;
  int height = 256;
  std::vector<SceneLayer> layers;
  double dot_density = 0.5;
  int dot_size = 4;
  DotProfile dot_profile = DotProfile::kDots;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  // Content-preserving resize: scales layer geometry, disparity planes and
  // dot size by factor, mirroring the resize protocol used for growth curves.
  SceneSpec scaled(int factor) const;
};

struct Scene {
  Grid left;   // single channel, values in [0, 1] plus noise
  Grid right;
  DisparityMap gt_left;
  DisparityMap gt_right;
  BoolMask occlusion;  // left-view: not visible in the right view
};

Scene generate_scene(const SceneSpec& spec);

// Flat `key = value` text with repeated `layer` entries, '#' comments.
SceneSpec parse_scene_spec(std::istream& in);
SceneSpec parse_scene_spec_file(const std::string& path);

}  // namespace stereodecomp
