#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace melscreen {

// 8-bit interleaved RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 bytes per pixel, row-major

  RgbImage() = default;
  RgbImage(int w, int h)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}
};

// Grayscale raster with intensities in [0, 1] on the 256-level grid.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixels() const { return data.size(); }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 0 or 1, row-major

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false)
      : width(w), height(h),
        data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  std::uint8_t& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t area() const;  // number of true pixels
  bool empty_mask() const { return area() == 0; }
};

// Flat disk structuring element: offsets with dx^2 + dy^2 <= radius^2.
struct StructuringElement {
  int radius = 1;
  std::vector<std::pair<int, int>> offsets;

  static StructuringElement disk(int radius);
};

// BT.601 luma, quantized to the 256-level grid then scaled into [0, 1].
GrayImage to_grayscale(const RgbImage& rgb);

// Downscales so width*height <= max_pixels (bilinear, aspect preserved).
// Images already small enough pass through untouched.
GrayImage resize_to_area(const GrayImage& img, long max_pixels);

// kernel must be odd and >= 1; borders replicate the edge pixel.
GrayImage median_filter(const GrayImage& img, int kernel);

// round(factor * p / 256) bumped to the next odd value (median kernels).
int median_kernel_for(int p, double factor);
// round(factor * p / 256) clamped to >= 1 (disk radii).
int disk_radius_for(int p, double factor);

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se);

// Keeps only the largest 8-connected component. Ties keep the component whose
// first pixel in row-major order comes first. Empty masks pass through.
BinaryMask largest_component(const BinaryMask& mask);

// Disk centered at ((w-1)/2, (h-1)/2) in real coordinates.
BinaryMask disk_mask(int width, int height, double radius);

}  // namespace melscreen
