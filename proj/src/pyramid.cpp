#include "stereodecomp/pyramid.hpp"

#include <cmath>
#include <limits>

#include "stereodecomp/parallel.hpp"

namespace stereodecomp {

namespace {

constexpr int kNormWindowRadius = 4;  // 9x9 local normalization window
constexpr double kNormEpsilon = 1e-4;

// Fixed census neighbor order: row-major over the 3x3 window, center skipped.
constexpr int kCensusOffsets[8][2] = {
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

Grid to_luminance(const Grid& image) {
  if (image.channels == 1) return image;
  Grid out(1, image.height, image.width);
  for (int r = 0; r < image.height; ++r)
    for (int w = 0; w < image.width; ++w)
      out.at(0, r, w) =
          0.299 * image.at(0, r, w) + 0.587 * image.at(1, r, w) + 0.114 * image.at(2, r, w);
  return out;
}

Grid pad_replicate(const Grid& g, int target_h, int target_w) {
  if (g.height == target_h && g.width == target_w) return g;
  Grid out(g.channels, target_h, target_w);
  for (int c = 0; c < g.channels; ++c)
    for (int r = 0; r < target_h; ++r)
      for (int w = 0; w < target_w; ++w) out.at(c, r, w) = g.at_clamped(c, r, w);
  return out;
}

}  // namespace

int PyramidConfig::ipow(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > std::numeric_limits<int>::max()) throw OverflowError("scale^level overflows int");
  }
  return static_cast<int>(v);
}

int PyramidConfig::level_height(int l) const { return reference_height * ipow(scale, l); }
int PyramidConfig::level_width(int l) const { return reference_width * ipow(scale, l); }
int PyramidConfig::level_disparities(int l) const { return reference_disparities * ipow(scale, l); }

void PyramidConfig::validate() const {
  if (levels < 0) throw InvalidConfig("levels must be >= 0");
  if (scale < 2) throw InvalidConfig("scale must be >= 2");
  if (reference_disparities < 1) throw InvalidConfig("reference_disparities must be >= 1");
  if (feature_channels < 3 || feature_channels > 11)
    throw InvalidConfig("feature_channels must be in [3, 11]");
}

FittedImage fit_input(const Grid& image, PyramidConfig& config) {
  if (image.height < 1 || image.width < 1) throw InvalidInput("zero-area image");
  if (image.channels != 1 && image.channels != 3)
    throw InvalidInput("image must have 1 or 3 channels");
  const int block = PyramidConfig::ipow(config.scale, config.levels);
  FittedImage fitted;
  fitted.original_height = image.height;
  fitted.original_width = image.width;
  const int target_h = ((image.height + block - 1) / block) * block;
  const int target_w = ((image.width + block - 1) / block) * block;
  fitted.image = pad_replicate(to_luminance(image), target_h, target_w);
  config.reference_height = target_h / block;
  config.reference_width = target_w / block;
  return fitted;
}

Grid area_downsample(const Grid& g, int scale) {
  if (scale < 1) throw InvalidInput("downsample scale must be >= 1");
  if (g.height % scale != 0 || g.width % scale != 0)
    throw InvalidInput("dimensions not divisible by scale");
  Grid out(g.channels, g.height / scale, g.width / scale);
  const double inv = 1.0 / (scale * scale);
  for (int c = 0; c < g.channels; ++c)
    for (int r = 0; r < out.height; ++r)
      for (int w = 0; w < out.width; ++w) {
        double acc = 0.0;
        for (int dr = 0; dr < scale; ++dr)
          for (int dw = 0; dw < scale; ++dw) acc += g.at(c, r * scale + dr, w * scale + dw);
        out.at(c, r, w) = acc * inv;
      }
  return out;
}

Grid upsample_features(const Grid& g, int scale) {
  if (scale < 1) throw InvalidInput("upsample scale must be >= 1");
  Grid out(g.channels, g.height * scale, g.width * scale);
  // Corner-aligned: output corners map exactly onto input corners.
  const double ry = out.height > 1 ? double(g.height - 1) / (out.height - 1) : 0.0;
  const double rx = out.width > 1 ? double(g.width - 1) / (out.width - 1) : 0.0;
  parallel_rows(out.height, [&](int r) {
    const double y = r * ry;
    const int y0 = static_cast<int>(y);
    const int y1 = std::min(y0 + 1, g.height - 1);
    const double fy = y - y0;
    for (int w = 0; w < out.width; ++w) {
      const double x = w * rx;
      const int x0 = static_cast<int>(x);
      const int x1 = std::min(x0 + 1, g.width - 1);
      const double fx = x - x0;
      for (int c = 0; c < g.channels; ++c) {
        const double top = g.at(c, y0, x0) * (1.0 - fx) + g.at(c, y0, x1) * fx;
        const double bot = g.at(c, y1, x0) * (1.0 - fx) + g.at(c, y1, x1) * fx;
        out.at(c, r, w) = top * (1.0 - fy) + bot * fy;
      }
    }
  });
  return out;
}

namespace {

Grid features_of_level(const Grid& img, int feature_channels) {
  Grid out(feature_channels, img.height, img.width);
  parallel_rows(img.height, [&](int r) {
    for (int w = 0; w < img.width; ++w) {
      // Locally normalized intensity.
      double sum = 0.0, sq = 0.0;
      int n = 0;
      for (int dr = -kNormWindowRadius; dr <= kNormWindowRadius; ++dr)
        for (int dw = -kNormWindowRadius; dw <= kNormWindowRadius; ++dw) {
          const int rr = r + dr, ww = w + dw;
          if (rr < 0 || rr >= img.height || ww < 0 || ww >= img.width) continue;
          const double v = img.at(0, rr, ww);
          sum += v;
          sq += v * v;
          ++n;
        }
      const double mean = sum / n;
      const double var = std::max(0.0, sq / n - mean * mean);
      out.at(0, r, w) = (img.at(0, r, w) - mean) / std::sqrt(var + kNormEpsilon);

      if (feature_channels > 1)
        out.at(1, r, w) = 0.5 * (img.at_clamped(0, r, w + 1) - img.at_clamped(0, r, w - 1));
      if (feature_channels > 2)
        out.at(2, r, w) = 0.5 * (img.at_clamped(0, r + 1, w) - img.at_clamped(0, r - 1, w));

      const double center = img.at(0, r, w);
      for (int k = 0; k + 3 < feature_channels; ++k) {
        const double nb = img.at_clamped(0, r + kCensusOffsets[k][0], w + kCensusOffsets[k][1]);
        out.at(3 + k, r, w) = nb > center ? 1.0 : (nb < center ? -1.0 : 0.0);
      }
    }
  });
  return out;
}

}  // namespace

std::vector<Grid> extract_features(const FittedImage& fitted, const PyramidConfig& config) {
  config.validate();
  std::vector<Grid> images(config.levels + 1);
  images[config.levels] = fitted.image;
  for (int l = config.levels - 1; l >= 0; --l)
    images[l] = area_downsample(images[l + 1], config.scale);

  std::vector<Grid> features(config.levels + 1);
  for (int l = 0; l <= config.levels; ++l)
    features[l] = features_of_level(images[l], config.feature_channels);
  return features;
}

}  // namespace stereodecomp
