#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "melscreen/haar.hpp"
#include "melscreen/rng.hpp"

using namespace melscreen;

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

// Test-only synthesis (inverse of the analysis in haar_dwt2): undo columns,
// then rows, one level at a time.
std::vector<double> haar_inverse_level(const std::vector<double>& ll,
                                       const HaarDecomposition::Level& lvl) {
  const int half = lvl.side;
  const int side = half * 2;
  std::vector<double> low(static_cast<std::size_t>(half) * side);
  std::vector<double> high(static_cast<std::size_t>(half) * side);
  for (int y = 0; y < half; ++y) {
    for (int x = 0; x < half; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * half + x;
      low[static_cast<std::size_t>(2 * y) * half + x] = (ll[i] + lvl.lh[i]) * kInvSqrt2;
      low[static_cast<std::size_t>(2 * y + 1) * half + x] =
          (ll[i] - lvl.lh[i]) * kInvSqrt2;
      high[static_cast<std::size_t>(2 * y) * half + x] =
          (lvl.hl[i] + lvl.hh[i]) * kInvSqrt2;
      high[static_cast<std::size_t>(2 * y + 1) * half + x] =
          (lvl.hl[i] - lvl.hh[i]) * kInvSqrt2;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(side) * side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < half; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * half + x;
      out[static_cast<std::size_t>(y) * side + 2 * x] = (low[i] + high[i]) * kInvSqrt2;
      out[static_cast<std::size_t>(y) * side + 2 * x + 1] =
          (low[i] - high[i]) * kInvSqrt2;
    }
  }
  return out;
}

std::vector<double> haar_synthesize(const HaarDecomposition& dec) {
  std::vector<double> current = dec.ll;
  for (auto it = dec.detail.rbegin(); it != dec.detail.rend(); ++it) {
    current = haar_inverse_level(current, *it);
  }
  return current;
}

double energy_of(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

}  // namespace

TEST_CASE("analysis/synthesis round trip and energy preservation over 500 patches") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> patch(24 * 24);
    for (auto& v : patch) v = rng.next_unit();
    const HaarDecomposition dec = haar_dwt2(patch, 24, 3);

    double coeff_energy = energy_of(dec.ll);
    for (const auto& lvl : dec.detail) {
      coeff_energy += energy_of(lvl.lh) + energy_of(lvl.hl) + energy_of(lvl.hh);
    }
    const double pixel_energy = energy_of(patch);
    CHECK(std::abs(coeff_energy - pixel_energy) <= 1e-10 * pixel_energy);

    const std::vector<double> back = haar_synthesize(dec);
    double max_err = 0.0;
    for (std::size_t i = 0; i < patch.size(); ++i) {
      max_err = std::max(max_err, std::abs(back[i] - patch[i]));
    }
    CHECK(max_err < 1e-10);
  }
}

TEST_CASE("decomposition shapes for a 24x24 3-level transform") {
  const std::vector<double> patch(24 * 24, 0.0);
  const HaarDecomposition dec = haar_dwt2(patch, 24, 3);
  REQUIRE(dec.detail.size() == 3);
  CHECK(dec.detail[0].side == 12);
  CHECK(dec.detail[1].side == 6);
  CHECK(dec.detail[2].side == 3);
  CHECK(dec.ll_side == 3);
  CHECK(dec.ll.size() == 9);
  CHECK_THROWS_AS(haar_dwt2(std::vector<double>(100, 0.0), 10, 3),
                  std::invalid_argument);
}

TEST_CASE("constant patch concentrates in LL with gain 8") {
  const double c = 0.37;
  const std::vector<double> patch(24 * 24, c);
  const HaarDecomposition dec = haar_dwt2(patch, 24, 3);
  for (const auto& lvl : dec.detail) {
    for (const auto* band : {&lvl.lh, &lvl.hl, &lvl.hh}) {
      for (double v : *band) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  for (double v : dec.ll) CHECK(v == doctest::Approx(8.0 * c));
}

TEST_CASE("2x2-period checkerboard puts all energy in level-1 HH") {
  std::vector<double> patch(24 * 24);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) {
      patch[static_cast<std::size_t>(y) * 24 + x] = ((x + y) % 2 == 0) ? 1.0 : -1.0;
    }
  }
  const HaarDecomposition dec = haar_dwt2(patch, 24, 3);
  const double total = energy_of(patch);
  CHECK(energy_of(dec.detail[0].hh) == doctest::Approx(total).epsilon(1e-10));
  CHECK(energy_of(dec.detail[0].lh) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(energy_of(dec.detail[0].hl) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(energy_of(dec.ll) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("descriptor length, constant case, homogeneity and shift invariance") {
  Rng rng(5);
  std::vector<double> patch(24 * 24);
  for (auto& v : patch) v = rng.next_unit();

  const std::vector<double> desc = haar_descriptor(patch, 24, 3);
  CHECK(desc.size() == 20);

  const std::vector<double> flat(24 * 24, 0.5);
  const std::vector<double> fdesc = haar_descriptor(flat, 24, 3);
  for (std::size_t i = 0; i + 2 < fdesc.size(); ++i) {
    CHECK(fdesc[i] == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(fdesc[18] == doctest::Approx(4.0));  // LL mean = 8 * 0.5
  CHECK(fdesc[19] == doctest::Approx(0.0).epsilon(1e-12));

  // Homogeneity: descriptor(alpha * u) = alpha * descriptor(u).
  std::vector<double> scaled = patch;
  for (auto& v : scaled) v *= 2.5;
  const std::vector<double> sdesc = haar_descriptor(scaled, 24, 3);
  for (std::size_t i = 0; i < desc.size(); ++i) {
    CHECK(sdesc[i] == doctest::Approx(2.5 * desc[i]).epsilon(1e-9));
  }

  // Constant shift changes only the LL mean.
  std::vector<double> shifted = patch;
  for (auto& v : shifted) v += 0.125;
  const std::vector<double> shdesc = haar_descriptor(shifted, 24, 3);
  for (std::size_t i = 0; i < desc.size(); ++i) {
    if (i == 18) {
      CHECK(shdesc[i] == doctest::Approx(desc[i] + 8.0 * 0.125));
    } else {
      CHECK(shdesc[i] == doctest::Approx(desc[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("patch center sampling follows the grid rule") {
  const PatchGridSpec spec;  // step 10, side 24
  BinaryMask all(100, 100, true);
  const auto centers = sample_patch_centers(all, spec);
  CHECK(centers.size() == 64);  // {12, 22, ..., 82}^2
  CHECK(centers.front() == std::make_pair(12, 12));
  CHECK(centers.back() == std::make_pair(82, 82));

  const BinaryMask none(100, 100, false);
  CHECK(sample_patch_centers(none, spec).empty());

  BinaryMask one(100, 100, false);
  one.at(12, 12) = 1;
  CHECK(sample_patch_centers(one, spec).size() == 1);

  // Monotone in the mask.
  BinaryMask half(100, 100, false);
  for (int y = 0; y < 50; ++y)
    for (int x = 0; x < 100; ++x) half.at(x, y) = 1;
  CHECK(sample_patch_centers(half, spec).size() <= centers.size());

  CHECK(sample_patch_centers(BinaryMask(20, 20, true), spec).empty());
}

TEST_CASE("extract_haar_features composes sampling and descriptors") {
  const PatchGridSpec spec;
  const GrayImage img(100, 100, 0.25f);
  const BinaryMask mask(100, 100, true);
  const LocalFeatureSet set = extract_haar_features(img, mask, spec);
  CHECK(set.dim == 20);
  REQUIRE(set.size() == 64);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(set.row(i)[18] == doctest::Approx(2.0));  // 8 * 0.25
  }

  const LocalFeatureSet none =
      extract_haar_features(img, BinaryMask(100, 100, false), spec);
  CHECK(none.size() == 0);
  CHECK(none.dim == 20);
}
