#pragma once

#include <cstdint>
#include <vector>

#include "stereodecomp/errors.hpp"

namespace stereodecomp {

// Rectangular multi-channel array of real values indexed (channel, row, col).
// Images, feature maps, disparity maps and soft masks all live in this type.
struct Grid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;  // channel-major: data[(c*height + r)*width + w]

  Grid() = default;
  Grid(int channels, int height, int width, double fill = 0.0);

  double& at(int c, int r, int w) { return data[index(c, r, w)]; }
  double at(int c, int r, int w) const { return data[index(c, r, w)]; }

  std::size_t index(int c, int r, int w) const {
    return (static_cast<std::size_t>(c) * height + r) * width + w;
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Grid& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }
  bool all_finite() const;

  // Clamped single-channel access, replicating edge values outside the frame.
  double at_clamped(int c, int r, int w) const;
};

// Reverses column order of every channel (used to re-run matching with the
// roles of the two views exchanged).
Grid flip_horizontal(const Grid& g);

// Single-channel boolean raster.
struct BoolMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  BoolMask() = default;
  BoolMask(int height, int width, bool fill = false)
      : height(height), width(width), data(static_cast<std::size_t>(height) * width, fill ? 1 : 0) {}

  bool at(int r, int w) const { return data[static_cast<std::size_t>(r) * width + w] != 0; }
  void set(int r, int w, bool v) { data[static_cast<std::size_t>(r) * width + w] = v ? 1 : 0; }
  std::size_t count() const;
};

BoolMask flip_horizontal(const BoolMask& m);

// Single-channel disparity raster plus a per-pixel validity mask.
struct DisparityMap {
  Grid values;      // channels == 1
  BoolMask valid;

  DisparityMap() = default;
  DisparityMap(int height, int width, double fill = 0.0, bool valid_fill = true)
      : values(1, height, width, fill), valid(height, width, valid_fill) {}

  int height() const { return values.height; }
  int width() const { return values.width; }
  double at(int r, int w) const { return values.at(0, r, w); }
  double& at(int r, int w) { return values.at(0, r, w); }
};

DisparityMap flip_horizontal(const DisparityMap& d);

}  // namespace stereodecomp
