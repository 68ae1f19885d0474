#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace melscreen {

// Row-major float matrix, the payload of the MFV1 container.
struct MatrixF {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> data;

  MatrixF() = default;
  MatrixF(std::uint32_t r, std::uint32_t c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.f) {}

  float* row(std::uint32_t r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const float* row(std::uint32_t r) const {
    return data.data() + static_cast<std::size_t>(r) * cols;
  }
};

// MFV1 container: magic "MFV1", u32-le row count, u32-le column count,
// rows*cols IEEE-754 32-bit little-endian values, row-major.
void write_matrix(const std::filesystem::path& path, const MatrixF& m);
MatrixF read_matrix_file(const std::filesystem::path& path);

// FNV-1a 64-bit, used for content-addressed cache names and config hashes.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

std::vector<char> read_file_bytes(const std::filesystem::path& path);

}  // namespace melscreen
