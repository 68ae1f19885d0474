#include "melscreen/dsift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace melscreen {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Separable Gaussian blur with reflected borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;

  auto reflect = [](int i, int n) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - i - 1;
    }
    return i;
  };

  GrayImage tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               img.at(reflect(x + i, img.width), y);
      }
      tmp.at(x, y) = static_cast<float>(acc);
    }
  }
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               tmp.at(x, reflect(y + i, img.height));
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

LocalFeatureSet dense_sift(const GrayImage& img, const DenseSiftSpec& spec,
                           int patch_size) {
  if (spec.step < 1) throw std::invalid_argument("dense_sift step must be >= 1");
  if (patch_size < 4) throw std::invalid_argument("patch_size must be >= 4");

  LocalFeatureSet set;
  set.dim = kSiftDim;
  if (img.width < patch_size || img.height < patch_size) return set;

  const double sigma = std::max(patch_size / 12.0, 0.5);
  const GrayImage smooth = gaussian_blur(img, sigma);

  // Central-difference gradients, clamped at the border.
  std::vector<float> gmag(img.pixels()), gang(img.pixels());
  for (int y = 0; y < img.height; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, img.height - 1);
    for (int x = 0; x < img.width; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, img.width - 1);
      const double gx = (smooth.at(xp, y) - smooth.at(xm, y)) * 0.5;
      const double gy = (smooth.at(x, yp) - smooth.at(x, ym)) * 0.5;
      const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      gmag[i] = static_cast<float>(std::sqrt(gx * gx + gy * gy));
      double a = std::atan2(gy, gx);
      if (a < 0) a += kTwoPi;
      gang[i] = static_cast<float>(a);
    }
  }

  const int half = patch_size / 2;
  const double cell = patch_size / 4.0;
  const double sigma_w = patch_size / 2.0;
  float desc[kSiftDim];

  for (int cy = half; cy + half <= img.height; cy += spec.step) {
    for (int cx = half; cx + half <= img.width; cx += spec.step) {
      std::fill(desc, desc + kSiftDim, 0.f);
      const int x0 = cx - half;
      const int y0 = cy - half;
      for (int py = 0; py < patch_size; ++py) {
        for (int px = 0; px < patch_size; ++px) {
          const std::size_t i =
              static_cast<std::size_t>(y0 + py) * img.width + (x0 + px);
          const double mag = gmag[i];
          if (mag == 0.0) continue;
          // Patch-centered coordinates of the pixel center.
          const double dx = px + 0.5 - half;
          const double dy = py + 0.5 - half;
          const double wgauss =
              std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_w * sigma_w));
          // Cell coordinates in [-0.5, 3.5].
          const double u = (px + 0.5) / cell - 0.5;
          const double v = (py + 0.5) / cell - 0.5;
          const int u0 = static_cast<int>(std::floor(u));
          const int v0 = static_cast<int>(std::floor(v));
          const double fu = u - u0;
          const double fv = v - v0;
          const double o = gang[i] / (kTwoPi / 8.0);
          const int o0 = static_cast<int>(std::floor(o));
          const double fo = o - o0;
          for (int du = 0; du <= 1; ++du) {
            const int cu = u0 + du;
            if (cu < 0 || cu > 3) continue;
            const double wu = du ? fu : 1.0 - fu;
            for (int dv = 0; dv <= 1; ++dv) {
              const int cv = v0 + dv;
              if (cv < 0 || cv > 3) continue;
              const double wv = dv ? fv : 1.0 - fv;
              for (int dob = 0; dob <= 1; ++dob) {
                const int ob = (o0 + dob) & 7;
                const double wo = dob ? fo : 1.0 - fo;
                desc[(cv * 4 + cu) * 8 + ob] +=
                    static_cast<float>(mag * wgauss * wu * wv * wo);
              }
            }
          }
        }
      }
      // Standard SIFT post-processing: l2, clip at 0.2, re-l2.
      double norm = 0.0;
      for (float f : desc) norm += static_cast<double>(f) * f;
      norm = std::sqrt(norm);
      if (norm > 1e-12) {
        for (float& f : desc) {
          f = static_cast<float>(std::min(static_cast<double>(f) / norm, 0.2));
        }
        norm = 0.0;
        for (float f : desc) norm += static_cast<double>(f) * f;
        norm = std::sqrt(norm);
        for (float& f : desc) f = static_cast<float>(f / norm);
      } else {
        std::fill(desc, desc + kSiftDim, 0.f);
      }
      set.append(desc, cx, cy);
    }
  }
  return set;
}

void rootsift(float* desc, int dim) {
  double l1 = 0.0;
  for (int i = 0; i < dim; ++i) {
    if (desc[i] < 0.f) throw std::invalid_argument("rootsift: negative component");
    l1 += desc[i];
  }
  if (l1 <= 0.0) return;  // zero vector passes through
  for (int i = 0; i < dim; ++i) {
    desc[i] = static_cast<float>(std::sqrt(desc[i] / l1));
  }
}

void sparsify(float* desc, int dim, double threshold) {
  // Compare in float so a component exactly at the threshold is kept even
  // though float(threshold) promoted to double sits slightly below it.
  const float t = static_cast<float>(threshold);
  for (int i = 0; i < dim; ++i) {
    if (desc[i] < t) desc[i] = 0.f;
  }
}

DenseRootSiftResult extract_dense_rootsift(const GrayImage& img,
                                           const DenseSiftSpec& spec) {
  DenseRootSiftResult out;
  const GrayImage resized = resize_to_area(img, spec.max_pixels);
  out.width = resized.width;
  out.height = resized.height;
  out.features.dim = kSiftDim;
  std::vector<int> sizes = spec.patch_sizes;
  std::sort(sizes.begin(), sizes.end());
  for (int ps : sizes) {
    LocalFeatureSet scale = dense_sift(resized, spec, ps);
    for (std::size_t i = 0; i < scale.size(); ++i) {
      rootsift(scale.row(i), kSiftDim);
      sparsify(scale.row(i), kSiftDim, spec.sparsify_threshold);
      out.features.append(scale.row(i), scale.centers[i].first,
                          scale.centers[i].second);
    }
  }
  return out;
}

}  // namespace melscreen
