#include "stereodecomp/grid.hpp"

#include <algorithm>
#include <cmath>

namespace stereodecomp {

Grid::Grid(int channels_, int height_, int width_, double fill) {
  if (channels_ < 1 || height_ < 1 || width_ < 1) {
    throw InvalidInput("grid dimensions must be positive");
  }
  channels = channels_;
  height = height_;
  width = width_;
  data.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

bool Grid::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Grid::at_clamped(int c, int r, int w) const {
  r = std::clamp(r, 0, height - 1);
  w = std::clamp(w, 0, width - 1);
  return at(c, r, w);
}

Grid flip_horizontal(const Grid& g) {
  Grid out(g.channels, g.height, g.width);
  for (int c = 0; c < g.channels; ++c)
    for (int r = 0; r < g.height; ++r)
      for (int w = 0; w < g.width; ++w) out.at(c, r, w) = g.at(c, r, g.width - 1 - w);
  return out;
}

std::size_t BoolMask::count() const {
  std::size_t n = 0;
  for (auto v : data) n += v != 0;
  return n;
}

BoolMask flip_horizontal(const BoolMask& m) {
  BoolMask out(m.height, m.width);
  for (int r = 0; r < m.height; ++r)
    for (int w = 0; w < m.width; ++w) out.set(r, w, m.at(r, m.width - 1 - w));
  return out;
}

DisparityMap flip_horizontal(const DisparityMap& d) {
  DisparityMap out;
  out.values = flip_horizontal(d.values);
  out.valid = flip_horizontal(d.valid);
  return out;
}

}  // namespace stereodecomp
