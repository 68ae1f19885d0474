#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace melscreen {

// Per-image set of local descriptors with their patch-center coordinates.
struct LocalFeatureSet {
  int dim = 0;
  std::vector<float> descriptors;            // size() * dim, row-major
  std::vector<std::pair<int, int>> centers;  // (x, y) pixel coordinates

  std::size_t size() const { return centers.size(); }
  float* row(std::size_t i) { return descriptors.data() + i * static_cast<std::size_t>(dim); }
  const float* row(std::size_t i) const {
    return descriptors.data() + i * static_cast<std::size_t>(dim);
  }
  void append(const float* desc, int x, int y) {
    descriptors.insert(descriptors.end(), desc, desc + dim);
    centers.emplace_back(x, y);
  }
};

}  // namespace melscreen
