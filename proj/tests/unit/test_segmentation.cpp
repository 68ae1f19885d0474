#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "melscreen/image.hpp"
#include "melscreen/rng.hpp"
#include "melscreen/segmentation.hpp"

using namespace melscreen;

namespace {

GrayImage disk_image(int size, double radius, float inside, float outside,
                     double noise_sigma, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(size, size, outside);
  const double c = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if ((x - c) * (x - c) + (y - c) * (y - c) <= radius * radius) {
        img.at(x, y) = inside;
      }
      if (noise_sigma > 0.0) {
        const double v = img.at(x, y) + rng.next_normal(0.0, noise_sigma);
        img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return img;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] && b.data[i]) ++inter;
    if (a.data[i] || b.data[i]) ++uni;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool single_component(const BinaryMask& m) {
  if (m.empty_mask()) return false;
  return largest_component(m).area() == m.area();
}

}  // namespace

TEST_CASE("chan_vese recovers a clean disk") {
  const GrayImage img = disk_image(128, 30, 0.9f, 0.1f, 0.0, 0);
  const BinaryMask truth = disk_mask(128, 128, 30);
  ChanVeseParams params;
  const BinaryMask mask = chan_vese(img, params);
  CHECK(iou(mask, truth) >= 0.98);
}

TEST_CASE("chan_vese on a constant image returns the initialization disk") {
  const GrayImage img(64, 64, 0.5f);
  ChanVeseParams params;
  const BinaryMask mask = chan_vese(img, params);
  const BinaryMask init = disk_mask(64, 64, params.init_radius_fraction * 64);
  CHECK(mask.data == init.data);
}

TEST_CASE("chan_vese is invariant under intensity inversion on two-level images") {
  GrayImage img = disk_image(96, 25, 0.85f, 0.15f, 0.0, 0);
  GrayImage inv = img;
  for (auto& v : inv.data) v = 1.f - v;
  ChanVeseParams params;
  params.iterations = 600;
  const BinaryMask a = largest_component(chan_vese(img, params));
  const BinaryMask b = largest_component(chan_vese(inv, params));
  CHECK(iou(a, b) >= 0.99);
}

TEST_CASE("chan_vese rejects tiny images") {
  CHECK_THROWS_AS(chan_vese(GrayImage(2, 2, 0.f), ChanVeseParams{}),
                  std::invalid_argument);
}

TEST_CASE("segment_lesion handles noisy disks, uniform images and two blobs") {
  ChanVeseParams params;
  const GrayImage noisy = disk_image(128, 30, 0.25f, 0.75f, 0.1, 3);
  const BinaryMask mask = segment_lesion(noisy, params);
  CHECK(single_component(mask));
  CHECK(iou(mask, disk_mask(128, 128, 30)) >= 0.85);

  const BinaryMask fallback = segment_lesion(GrayImage(96, 96, 0.4f), params);
  CHECK_FALSE(fallback.empty_mask());
  CHECK(single_component(fallback));

  // Two dark blobs, areas ~500 and ~5000: only the large one survives.
  GrayImage two(160, 160, 0.8f);
  for (int y = 0; y < 160; ++y) {
    for (int x = 0; x < 160; ++x) {
      const double d1 = std::hypot(x - 40.0, y - 40.0);
      const double d2 = std::hypot(x - 110.0, y - 110.0);
      if (d1 <= 12.0 || d2 <= 40.0) two.at(x, y) = 0.2f;
    }
  }
  const BinaryMask big = segment_lesion(two, params);
  CHECK(single_component(big));
  CHECK(big.at(110, 110) == 1);
  CHECK(big.at(40, 40) == 0);
}

TEST_CASE("energy terms behave as defined") {
  // Perfect two-level image with the exact mask: data term 0.
  const GrayImage img = disk_image(64, 15, 0.9f, 0.1f, 0.0, 0);
  const BinaryMask truth = disk_mask(64, 64, 15);
  const double e = energy(img, truth, 0.0);
  CHECK(e == doctest::Approx(0.0).epsilon(1e-12));

  // All-true mask: perimeter 0, energy = total variance about the mean.
  BinaryMask all(64, 64, true);
  double mean = 0.0;
  for (float v : img.data) mean += v;
  mean /= static_cast<double>(img.data.size());
  double var = 0.0;
  for (float v : img.data) var += (v - mean) * (v - mean);
  CHECK(energy(img, all, 123.0) == doctest::Approx(var).epsilon(1e-9));

  // Checkerboard mask on a constant image: energy = mu * max perimeter.
  const GrayImage flat(4, 4, 0.5f);
  BinaryMask checker(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) checker.at(x, y) = (x + y) % 2;
  // Every horizontal and vertical neighbor pair differs: 2 * 4 * 3 = 24.
  CHECK(energy(flat, checker, 2.0) == doctest::Approx(2.0 * 24));
}

TEST_CASE("energy decreases over the evolution on the disk suite") {
  const GrayImage img = disk_image(96, 22, 0.9f, 0.1f, 0.05, 9);
  ChanVeseParams params;
  const double mu = params.mu;
  ChanVeseParams early = params;
  early.iterations = 100;
  ChanVeseParams late = params;
  late.iterations = 2000;
  const double e_init = energy(img, disk_mask(96, 96, 24), mu);
  const double e_late = energy(img, chan_vese(img, late), mu);
  CHECK(e_late <= e_init + 0.01 * e_init);
  CHECK(e_late <= energy(img, chan_vese(img, early), mu) + 0.01 * e_init);
}
