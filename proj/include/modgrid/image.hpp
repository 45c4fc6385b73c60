#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "modgrid/error.hpp"

namespace modgrid {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB, row-major, 3 bytes per pixel.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h, Rgb fill = {255, 255, 255}) : width(w), height(h), data(w * h * 3) {
    for (std::size_t i = 0; i < w * h; ++i) set(i, fill);
  }

  Rgb pixel(std::size_t x, std::size_t y) const {
    const std::size_t i = (y * width + x) * 3;
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set(std::size_t index, Rgb c) {
    data[index * 3] = c.r;
    data[index * 3 + 1] = c.g;
    data[index * 3 + 2] = c.b;
  }
  void set(std::size_t x, std::size_t y, Rgb c) { set(y * width + x, c); }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Brightness in [0, 1] (0 = black), row-major.
struct GreyRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
};

inline constexpr double luma(Rgb c) {
  return (0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b) / 255.0;
}

/// Rec. 709 luma.
inline GreyRaster to_greyscale(const RgbImage& image) {
  if (image.width == 0 || image.height == 0) throw Error(ErrorCode::InvalidArgument, "image has zero size");
  GreyRaster out{image.width, image.height, std::vector<double>(image.width * image.height)};
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::clamp(luma({image.data[i * 3], image.data[i * 3 + 1], image.data[i * 3 + 2]}), 0.0, 1.0);
  return out;
}

inline double normalize_value(double b, double norm_min, double norm_max) {
  return std::clamp((b - norm_min) / (norm_max - norm_min), 0.0, 1.0);
}

/// Linear stretch of [norm_min, norm_max] onto [0, 1], clamped.
inline GreyRaster normalize(const GreyRaster& raster, double norm_min, double norm_max) {
  if (!(norm_min < norm_max)) throw Error(ErrorCode::InvalidArgument, "normalization needs norm_min < norm_max");
  GreyRaster out = raster;
  for (double& v : out.values) v = normalize_value(v, norm_min, norm_max);
  return out;
}

}  // namespace modgrid
