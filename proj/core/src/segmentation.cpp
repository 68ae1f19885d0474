#include "melscreen/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace melscreen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGradFloor = 1e-8;

// Chamfer distance (1, sqrt 2 weights) from every pixel to the nearest pixel
// with the given mask value. Pixels already holding that value get 0.
std::vector<double> distance_to_value(const BinaryMask& mask, std::uint8_t value) {
  const int w = mask.width;
  const int h = mask.height;
  const double inf = std::numeric_limits<double>::infinity();
  const double diag = 1.4142135623730951;
  std::vector<double> d(mask.data.size(), inf);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (mask.data[i] == value) d[i] = 0.0;
  }
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  // Forward pass.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = d[idx(x, y)];
      if (x > 0) v = std::min(v, d[idx(x - 1, y)] + 1.0);
      if (y > 0) {
        v = std::min(v, d[idx(x, y - 1)] + 1.0);
        if (x > 0) v = std::min(v, d[idx(x - 1, y - 1)] + diag);
        if (x + 1 < w) v = std::min(v, d[idx(x + 1, y - 1)] + diag);
      }
      d[idx(x, y)] = v;
    }
  }
  // Backward pass.
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      double v = d[idx(x, y)];
      if (x + 1 < w) v = std::min(v, d[idx(x + 1, y)] + 1.0);
      if (y + 1 < h) {
        v = std::min(v, d[idx(x, y + 1)] + 1.0);
        if (x + 1 < w) v = std::min(v, d[idx(x + 1, y + 1)] + diag);
        if (x > 0) v = std::min(v, d[idx(x - 1, y + 1)] + diag);
      }
      d[idx(x, y)] = v;
    }
  }
  return d;
}

// Signed distance embedding of a mask: negative inside, zero crossing at the
// region boundary (half a pixel off the pixel centers).
std::vector<double> signed_distance(const BinaryMask& mask) {
  const double big = static_cast<double>(mask.width + mask.height);
  const std::size_t n = mask.data.size();
  std::vector<double> phi(n);
  const std::size_t inside = mask.area();
  if (inside == 0) {
    std::fill(phi.begin(), phi.end(), big);
    return phi;
  }
  if (inside == n) {
    std::fill(phi.begin(), phi.end(), -big);
    return phi;
  }
  const auto d_in = distance_to_value(mask, 1);
  const auto d_out = distance_to_value(mask, 0);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = mask.data[i] ? -(d_out[i] - 0.5) : (d_in[i] - 0.5);
  }
  return phi;
}

BinaryMask mask_from_phi(const std::vector<double>& phi, int w, int h) {
  BinaryMask mask(w, h);
  for (std::size_t i = 0; i < phi.size(); ++i) mask.data[i] = phi[i] < 0.0 ? 1 : 0;
  return mask;
}

}  // namespace

BinaryMask chan_vese(const GrayImage& img, const ChanVeseParams& params) {
  if (img.width < 3 || img.height < 3) {
    throw std::invalid_argument("chan_vese needs an image of at least 3x3");
  }
  if (params.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (params.init_radius_fraction <= 0.0 || params.init_radius_fraction >= 0.5) {
    throw std::invalid_argument("init_radius_fraction must be in (0, 0.5)");
  }

  const int w = img.width;
  const int h = img.height;
  const int p = std::min(w, h);
  const double radius = std::max(1.0, params.init_radius_fraction * p);
  const BinaryMask init = disk_mask(w, h, radius);

  const auto [mn, mx] = std::minmax_element(img.data.begin(), img.data.end());
  if (*mn == *mx) return init;  // constant image: evolution is degenerate

  std::vector<double> phi = signed_distance(init);
  std::vector<double> next(phi.size());

  double c1 = 0.0, c2 = 0.0;
  const double eps = params.epsilon;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  for (int it = 0; it < params.iterations; ++it) {
    double sum_in = 0.0, sum_out = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (phi[i] < 0.0) {
        sum_in += img.data[i];
        ++n_in;
      } else {
        sum_out += img.data[i];
        ++n_out;
      }
    }
    // A vanished region keeps its last mean rather than dividing by zero.
    if (n_in > 0) c1 = sum_in / static_cast<double>(n_in);
    if (n_out > 0) c2 = sum_out / static_cast<double>(n_out);

    for (int y = 0; y < h; ++y) {
      const int ym = std::max(y - 1, 0);
      const int yp = std::min(y + 1, h - 1);
      for (int x = 0; x < w; ++x) {
        const int xm = std::max(x - 1, 0);
        const int xp = std::min(x + 1, w - 1);
        const double c = phi[idx(x, y)];
        const double l = phi[idx(xm, y)];
        const double r = phi[idx(xp, y)];
        const double u = phi[idx(x, ym)];
        const double d = phi[idx(x, yp)];
        const double px = (r - l) * 0.5;
        const double py = (d - u) * 0.5;
        const double pxx = r - 2.0 * c + l;
        const double pyy = d - 2.0 * c + u;
        const double pxy = (phi[idx(xp, yp)] + phi[idx(xm, ym)] - phi[idx(xp, ym)] -
                            phi[idx(xm, yp)]) *
                           0.25;
        const double grad = std::max(std::sqrt(px * px + py * py), kGradFloor);
        const double kappa =
            (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) / (grad * grad * grad);
        const double uval = img.data[idx(x, y)];
        // Inside is phi < 0, so the data terms are flipped relative to the
        // inside-positive convention; the curvature term is sign-invariant.
        const double force = params.mu * kappa + (uval - c1) * (uval - c1) -
                             (uval - c2) * (uval - c2);
        const double delta = eps / (kPi * (eps * eps + c * c));
        next[idx(x, y)] = c + params.dt * delta * force;
      }
    }
    phi.swap(next);

    if (params.reinit_every > 0 && (it + 1) % params.reinit_every == 0 &&
        it + 1 < params.iterations) {
      phi = signed_distance(mask_from_phi(phi, w, h));
    }
  }
  return mask_from_phi(phi, w, h);
}

BinaryMask segment_lesion(const GrayImage& img, const ChanVeseParams& params) {
  const int p = std::min(img.width, img.height);
  const GrayImage filtered = median_filter(img, median_kernel_for(p, 5.0));
  BinaryMask mask = chan_vese(filtered, params);
  const auto se = StructuringElement::disk(disk_radius_for(p, 3.0));
  mask = morph_close(morph_open(mask, se), se);
  mask = largest_component(mask);
  if (mask.empty_mask()) {
    const double radius = std::max(1.0, params.init_radius_fraction * p);
    return disk_mask(img.width, img.height, radius);
  }
  return mask;
}

double energy(const GrayImage& img, const BinaryMask& mask, double mu) {
  if (img.width != mask.width || img.height != mask.height) {
    throw std::invalid_argument("energy: image and mask dimensions differ");
  }
  double sum_in = 0.0, sum_out = 0.0;
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    if (mask.data[i]) {
      sum_in += img.data[i];
      ++n_in;
    } else {
      sum_out += img.data[i];
      ++n_out;
    }
  }
  const double c1 = n_in ? sum_in / static_cast<double>(n_in) : 0.0;
  const double c2 = n_out ? sum_out / static_cast<double>(n_out) : 0.0;

  double data_term = 0.0;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double d = img.data[i] - (mask.data[i] ? c1 : c2);
    data_term += d * d;
  }

  std::size_t perimeter = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (x + 1 < mask.width && mask.at(x, y) != mask.at(x + 1, y)) ++perimeter;
      if (y + 1 < mask.height && mask.at(x, y) != mask.at(x, y + 1)) ++perimeter;
    }
  }
  return mu * static_cast<double>(perimeter) + data_term;
}

}  // namespace melscreen
