#include "melscreen/matrixio.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace melscreen {

namespace {

void put_u32le(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const MatrixF& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os.write("MFV1", 4);
  put_u32le(os, m.rows);
  put_u32le(os, m.cols);
  static_assert(sizeof(float) == 4);
  // Host is little-endian on every platform this builds for.
  os.write(reinterpret_cast<const char*>(m.data.data()),
           static_cast<std::streamsize>(m.data.size() * sizeof(float)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

MatrixF read_matrix_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open matrix file: " + path.string());
  unsigned char header[12];
  is.read(reinterpret_cast<char*>(header), 12);
  if (is.gcount() != 12 || std::memcmp(header, "MFV1", 4) != 0) {
    throw std::runtime_error("bad matrix magic in " + path.string());
  }
  MatrixF m;
  m.rows = get_u32le(header + 4);
  m.cols = get_u32le(header + 8);
  const std::size_t count = static_cast<std::size_t>(m.rows) * m.cols;
  m.data.resize(count);
  is.read(reinterpret_cast<char*>(m.data.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(float)) {
    throw std::runtime_error("truncated matrix payload in " + path.string());
  }
  return m;
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open file: " + path.string());
  is.seekg(0, std::ios::end);
  const auto size = is.tellg();
  is.seekg(0, std::ios::beg);
  std::vector<char> bytes(static_cast<std::size_t>(size));
  is.read(bytes.data(), size);
  if (!is) throw std::runtime_error("read failed: " + path.string());
  return bytes;
}

}  // namespace melscreen
