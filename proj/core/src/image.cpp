#include "melscreen/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>

namespace melscreen {

std::size_t BinaryMask::area() const {
  std::size_t n = 0;
  for (std::uint8_t v : data) n += v;
  return n;
}

StructuringElement StructuringElement::disk(int radius) {
  if (radius < 1) throw std::invalid_argument("structuring element radius must be >= 1");
  StructuringElement se;
  se.radius = radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) se.offsets.emplace_back(dx, dy);
    }
  }
  return se;
}

GrayImage to_grayscale(const RgbImage& rgb) {
  GrayImage out(rgb.width, rgb.height);
  const std::size_t n = out.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb.data[i * 3];
    const double g = rgb.data[i * 3 + 1];
    const double b = rgb.data[i * 3 + 2];
    const double luma = std::round(0.299 * r + 0.587 * g + 0.114 * b);
    out.data[i] = static_cast<float>(luma / 255.0);
  }
  return out;
}

GrayImage resize_to_area(const GrayImage& img, long max_pixels) {
  if (max_pixels < 1) throw std::invalid_argument("max_pixels must be >= 1");
  const long area = static_cast<long>(img.width) * img.height;
  if (area <= max_pixels) return img;
  const double s = std::sqrt(static_cast<double>(max_pixels) / static_cast<double>(area));
  const int nw = std::max(1, static_cast<int>(std::floor(img.width * s)));
  const int nh = std::max(1, static_cast<int>(std::floor(img.height * s)));
  GrayImage out(nw, nh);
  const double sx = static_cast<double>(img.width) / nw;
  const double sy = static_cast<double>(img.height) / nh;
  for (int y = 0; y < nh; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, img.height - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = std::clamp(fy - y0, 0.0, 1.0);
    for (int x = 0; x < nw; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, img.width - 1);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = std::clamp(fx - x0, 0.0, 1.0);
      const double top = img.at(x0, y0) * (1.0 - wx) + img.at(x1, y0) * wx;
      const double bot = img.at(x0, y1) * (1.0 - wx) + img.at(x1, y1) * wx;
      out.at(x, y) = static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
  return out;
}

GrayImage median_filter(const GrayImage& img, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw std::invalid_argument("median kernel must be odd and >= 1");
  }
  if (kernel == 1) return img;
  const int r = kernel / 2;
  GrayImage out(img.width, img.height);
  std::vector<float> window(static_cast<std::size_t>(kernel) * kernel);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::size_t n = 0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = std::clamp(y + dy, 0, img.height - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = std::clamp(x + dx, 0, img.width - 1);
          window[n++] = img.at(xx, yy);
        }
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(window.begin(), mid, window.begin() + static_cast<std::ptrdiff_t>(n));
      out.at(x, y) = *mid;
    }
  }
  return out;
}

int median_kernel_for(int p, double factor) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  int k = static_cast<int>(std::lround(factor * p / 256.0));
  if (k < 1) k = 1;
  if (k % 2 == 0) ++k;
  return k;
}

int disk_radius_for(int p, double factor) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  const int r = static_cast<int>(std::lround(factor * p / 256.0));
  return std::max(1, r);
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  BinaryMask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      bool all = true;
      for (const auto& [dx, dy] : se.offsets) {
        const int xx = x + dx;
        const int yy = y + dy;
        // Out-of-bounds counts as foreground so that closing is extensive
        // (mask subset of close(mask)) even at the image border.
        if (xx < 0 || yy < 0 || xx >= mask.width || yy >= mask.height) continue;
        if (!mask.at(xx, yy)) {
          all = false;
          break;
        }
      }
      out.at(x, y) = all ? 1 : 0;
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  BinaryMask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      bool any = false;
      for (const auto& [dx, dy] : se.offsets) {
        const int xx = x + dx;
        const int yy = y + dy;
        if (xx >= 0 && yy >= 0 && xx < mask.width && yy < mask.height &&
            mask.at(xx, yy)) {
          any = true;
          break;
        }
      }
      out.at(x, y) = any ? 1 : 0;
    }
  }
  return out;
}

BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se) {
  return dilate(erode(mask, se), se);
}

BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se) {
  return erode(dilate(mask, se), se);
}

BinaryMask largest_component(const BinaryMask& mask) {
  std::vector<std::int32_t> label(mask.data.size(), -1);
  std::vector<std::size_t> areas;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
      if (!mask.data[idx] || label[idx] >= 0) continue;
      const std::int32_t id = static_cast<std::int32_t>(areas.size());
      areas.push_back(0);
      label[idx] = id;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        ++areas[static_cast<std::size_t>(id)];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * mask.width + nx;
            if (mask.data[nidx] && label[nidx] < 0) {
              label[nidx] = id;
              queue.emplace_back(nx, ny);
            }
          }
        }
      }
    }
  }
  if (areas.empty()) return mask;
  // Labels are assigned in row-major discovery order, so on an area tie the
  // lower label is the component whose first pixel comes first.
  std::int32_t best = 0;
  for (std::int32_t i = 1; i < static_cast<std::int32_t>(areas.size()); ++i) {
    if (areas[static_cast<std::size_t>(i)] > areas[static_cast<std::size_t>(best)]) best = i;
  }
  BinaryMask out(mask.width, mask.height);
  for (std::size_t i = 0; i < label.size(); ++i) out.data[i] = (label[i] == best) ? 1 : 0;
  return out;
}

BinaryMask disk_mask(int width, int height, double radius) {
  if (radius < 1) throw std::invalid_argument("disk radius must be >= 1");
  BinaryMask out(width, height);
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      out.at(x, y) = (dx * dx + dy * dy <= radius * radius) ? 1 : 0;
    }
  }
  return out;
}

}  // namespace melscreen
