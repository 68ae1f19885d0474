#pragma once

#include <vector>

#include "melscreen/features.hpp"
#include "melscreen/image.hpp"

namespace melscreen {

struct DenseSiftSpec {
  int step = 8;
  std::vector<int> patch_sizes = {12, 26, 58, 128};
  double sparsify_threshold = 0.0025;
  long max_pixels = 100000;  // area cap applied before extraction
};

inline constexpr int kSiftDim = 128;  // 4x4 spatial cells x 8 orientation bins

// Upright dense SIFT at one patch size. Grid anchored at patch_size/2 with the
// full patch inside the image; rows ordered (y asc, x asc). Images smaller
// than the patch yield an empty set.
LocalFeatureSet dense_sift(const GrayImage& img, const DenseSiftSpec& spec,
                           int patch_size);

// l1-normalize then element-wise square root; the zero vector passes through.
void rootsift(float* desc, int dim);

// Components strictly below threshold are zeroed.
void sparsify(float* desc, int dim, double threshold);

// Resize to <= max_pixels, then union over patch sizes (ascending) of
// sparsify(rootsift(dense_sift)). Centers are in resized-image coordinates.
// Returns the feature set plus the resized dimensions.
struct DenseRootSiftResult {
  LocalFeatureSet features;
  int width = 0;   // resized image dims (the centers' coordinate frame)
  int height = 0;
};
DenseRootSiftResult extract_dense_rootsift(const GrayImage& img,
                                           const DenseSiftSpec& spec);

}  // namespace melscreen
