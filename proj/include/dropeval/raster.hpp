#pragma once

// Capture rendering: surviving blocks as filled black rectangles on a white
// 1024x1024 canvas with 100-pixel margins on all sides.
//
// The full grid width spans the 824-pixel content area (fixed camera), so
// one cell is s = 824/W pixels. Structures are bottom-anchored: grid row 0
// sits on pixel row 923. Rectangle corners round half away from zero.

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "dropeval/grid.hpp"
#include "dropeval/png.hpp"

namespace dropeval {

struct RasterImage {
  static constexpr int kSize = 1024;
  static constexpr int kMargin = 100;
  static constexpr int kContent = kSize - 2 * kMargin;  // 824

  std::vector<std::uint8_t> pixels;  // row-major, top row first; 0 black, 255 white

  RasterImage() : pixels(static_cast<std::size_t>(kSize) * kSize, 255) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * kSize + x];
  }

  std::size_t black_count() const {
    std::size_t n = 0;
    for (std::uint8_t p : pixels)
      if (p == 0) ++n;
    return n;
  }

  png::GrayImage to_gray() const { return png::GrayImage{kSize, kSize, pixels}; }

  static RasterImage from_gray(const png::GrayImage& img) {
    if (img.width != kSize || img.height != kSize)
      throw std::invalid_argument("capture images are 1024x1024");
    RasterImage out;
    out.pixels = img.pixels;
    return out;
  }
};

/// Pixels-per-cell scale for a grid width.
inline double raster_scale(const GridConfig& config) {
  return static_cast<double>(RasterImage::kContent) / config.width;
}

inline int round_half_away(double v) {
  return static_cast<int>(v < 0 ? std::ceil(v - 0.5) : std::floor(v + 0.5));
}

/// Renders every block not in `moving_ids` as a filled black rectangle.
inline RasterImage render(const LevelLayout& layout, std::span<const int> moving_ids = {}) {
  RasterImage img;
  const double s = raster_scale(layout.config());
  const std::unordered_set<int> moving(moving_ids.begin(), moving_ids.end());

  // Grid (gx, gy) maps to pixel x = 100 + gx*s; pixel row = 924 - gy*s,
  // counting rows downward. Rectangles are [left, right) x [top, bottom).
  const int base_row = RasterImage::kSize - RasterImage::kMargin;  // 924
  for (const PlacedBlock& b : layout.blocks()) {
    if (moving.contains(b.id)) continue;
    const Footprint fp = b.extent();
    const int left = round_half_away(RasterImage::kMargin + b.x * s);
    const int right = round_half_away(RasterImage::kMargin + (b.x + fp.width) * s);
    const int top = round_half_away(base_row - (b.y + fp.height) * s);
    const int bottom = round_half_away(base_row - b.y * s);
    for (int py = top; py < bottom; ++py)
      for (int px = left; px < right; ++px)
        img.pixels[static_cast<std::size_t>(py) * RasterImage::kSize + px] = 0;
  }
  return img;
}

inline void write_image(const RasterImage& img, const std::filesystem::path& path) {
  png::write_gray8(path, img.to_gray());
}

inline RasterImage read_image(const std::filesystem::path& path) {
  return RasterImage::from_gray(png::read_gray8(path));
}

}  // namespace dropeval
