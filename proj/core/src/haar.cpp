#include "melscreen/haar.hpp"

#include <cmath>
#include <stdexcept>

namespace melscreen {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

// One analysis level on a side x side block: ll/lh/hl/hh of side/2 each.
// Band XY: X is the filter along x, Y along y (L = sum, H = difference).
void haar_level(const std::vector<double>& in, int side, std::vector<double>& ll,
                std::vector<double>& lh, std::vector<double>& hl,
                std::vector<double>& hh) {
  const int half = side / 2;
  // Rows first (along x).
  std::vector<double> low(static_cast<std::size_t>(half) * side);
  std::vector<double> high(static_cast<std::size_t>(half) * side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < half; ++x) {
      const double a = in[static_cast<std::size_t>(y) * side + 2 * x];
      const double b = in[static_cast<std::size_t>(y) * side + 2 * x + 1];
      low[static_cast<std::size_t>(y) * half + x] = (a + b) * kInvSqrt2;
      high[static_cast<std::size_t>(y) * half + x] = (a - b) * kInvSqrt2;
    }
  }
  // Columns (along y).
  ll.resize(static_cast<std::size_t>(half) * half);
  lh.resize(static_cast<std::size_t>(half) * half);
  hl.resize(static_cast<std::size_t>(half) * half);
  hh.resize(static_cast<std::size_t>(half) * half);
  for (int y = 0; y < half; ++y) {
    for (int x = 0; x < half; ++x) {
      const double la = low[static_cast<std::size_t>(2 * y) * half + x];
      const double lb = low[static_cast<std::size_t>(2 * y + 1) * half + x];
      const double ha = high[static_cast<std::size_t>(2 * y) * half + x];
      const double hb = high[static_cast<std::size_t>(2 * y + 1) * half + x];
      ll[static_cast<std::size_t>(y) * half + x] = (la + lb) * kInvSqrt2;
      lh[static_cast<std::size_t>(y) * half + x] = (la - lb) * kInvSqrt2;
      hl[static_cast<std::size_t>(y) * half + x] = (ha + hb) * kInvSqrt2;
      hh[static_cast<std::size_t>(y) * half + x] = (ha - hb) * kInvSqrt2;
    }
  }
}

void mean_std(const std::vector<double>& v, double& mean, double& stddev) {
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  stddev = std::sqrt(ss / static_cast<double>(v.size()));  // population std
}

}  // namespace

std::vector<std::pair<int, int>> sample_patch_centers(const BinaryMask& mask,
                                                      const PatchGridSpec& spec) {
  std::vector<std::pair<int, int>> centers;
  if (spec.step < 1) throw std::invalid_argument("patch step must be >= 1");
  const int half = spec.side / 2;
  if (mask.width < spec.side || mask.height < spec.side) return centers;
  for (int y = half; y + half <= mask.height; y += spec.step) {
    for (int x = half; x + half <= mask.width; x += spec.step) {
      if (mask.at(x, y)) centers.emplace_back(x, y);
    }
  }
  return centers;
}

HaarDecomposition haar_dwt2(const std::vector<double>& patch, int side, int levels) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (side % (1 << levels) != 0) {
    throw std::invalid_argument("patch side must be divisible by 2^levels");
  }
  if (patch.size() != static_cast<std::size_t>(side) * side) {
    throw std::invalid_argument("patch size does not match side*side");
  }
  HaarDecomposition out;
  std::vector<double> current = patch;
  int cur_side = side;
  for (int l = 0; l < levels; ++l) {
    HaarDecomposition::Level lvl;
    lvl.side = cur_side / 2;
    std::vector<double> ll;
    haar_level(current, cur_side, ll, lvl.lh, lvl.hl, lvl.hh);
    out.detail.push_back(std::move(lvl));
    current = std::move(ll);
    cur_side /= 2;
  }
  out.ll = std::move(current);
  out.ll_side = cur_side;
  return out;
}

std::vector<double> haar_descriptor(const std::vector<double>& patch, int side,
                                    int levels) {
  const HaarDecomposition dec = haar_dwt2(patch, side, levels);
  std::vector<double> desc;
  desc.reserve(static_cast<std::size_t>(3 * levels + 1) * 2);
  double m = 0.0, s = 0.0;
  for (const auto& lvl : dec.detail) {
    for (const auto* band : {&lvl.lh, &lvl.hl, &lvl.hh}) {
      mean_std(*band, m, s);
      desc.push_back(m);
      desc.push_back(s);
    }
  }
  mean_std(dec.ll, m, s);
  desc.push_back(m);
  desc.push_back(s);
  return desc;
}

LocalFeatureSet extract_haar_features(const GrayImage& img, const BinaryMask& mask,
                                      const PatchGridSpec& spec) {
  if (img.width != mask.width || img.height != mask.height) {
    throw std::invalid_argument("extract_haar_features: image and mask dims differ");
  }
  LocalFeatureSet set;
  set.dim = 2 * (3 * spec.levels + 1);
  const auto centers = sample_patch_centers(mask, spec);
  const int half = spec.side / 2;
  std::vector<double> patch(static_cast<std::size_t>(spec.side) * spec.side);
  std::vector<float> row(static_cast<std::size_t>(set.dim));
  for (const auto& [cx, cy] : centers) {
    for (int y = 0; y < spec.side; ++y) {
      for (int x = 0; x < spec.side; ++x) {
        patch[static_cast<std::size_t>(y) * spec.side + x] =
            img.at(cx - half + x, cy - half + y);
      }
    }
    const auto desc = haar_descriptor(patch, spec.side, spec.levels);
    for (int i = 0; i < set.dim; ++i) row[static_cast<std::size_t>(i)] =
        static_cast<float>(desc[static_cast<std::size_t>(i)]);
    set.append(row.data(), cx, cy);
  }
  return set;
}

}  // namespace melscreen
