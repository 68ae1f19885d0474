#pragma once

#include <array>
#include <vector>

#include "melscreen/features.hpp"
#include "melscreen/image.hpp"

namespace melscreen {

struct PatchGridSpec {
  int step = 10;
  int side = 24;
  int levels = 3;
};

// Orthonormal 2-D Haar decomposition. detail[l] holds the level-(l+1) LH, HL
// and HH sub-bands (side / 2^(l+1) square each); ll is the final LL band.
struct HaarDecomposition {
  struct Level {
    int side = 0;
    std::vector<double> lh, hl, hh;
  };
  std::vector<Level> detail;
  int ll_side = 0;
  std::vector<double> ll;
};

// Candidate centers at side/2 + i*step in both axes with the full patch
// inside the mask bounds, kept only where the mask is true.
std::vector<std::pair<int, int>> sample_patch_centers(const BinaryMask& mask,
                                                      const PatchGridSpec& spec);

// patch is side*side row-major; side must be divisible by 2^levels.
HaarDecomposition haar_dwt2(const std::vector<double>& patch, int side, int levels);

// Mean and population std of each sub-band in fixed order
// (L1:LH,HL,HH; L2:LH,HL,HH; L3:LH,HL,HH; LL3) -> 20 values for 3 levels.
std::vector<double> haar_descriptor(const std::vector<double>& patch, int side,
                                    int levels);

// Descriptors computed on the unfiltered image at each sampled center.
LocalFeatureSet extract_haar_features(const GrayImage& img, const BinaryMask& mask,
                                      const PatchGridSpec& spec);

}  // namespace melscreen
