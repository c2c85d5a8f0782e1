#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lowlight/error.hpp"

namespace lowlight {

/// Little-endian binary writers/readers shared by the file containers
/// (checkpoints, NIQE models). Doubles travel as IEEE-754 bit patterns.

inline void put_u32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x),
                        static_cast<unsigned char>(x >> 8),
                        static_cast<unsigned char>(x >> 16),
                        static_cast<unsigned char>(x >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  put_u64(out, bits);
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_doubles(std::ostream& out, const std::vector<double>& xs) {
  for (double x : xs) put_f64(out, x);
}

/// Throws io_error mentioning `path` on any short read.
class BinReader {
 public:
  BinReader(const std::string& path, const char* what)
      : in_(path, std::ios::binary), path_(path), what_(what) {
    if (!in_) throw io_error(std::string("cannot open ") + what + ": " + path);
  }

  void need(std::size_t n, char* dst) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw io_error(std::string("corrupt ") + what_ + " (truncated): " + path_);
  }
  std::uint32_t u32() {
    unsigned char b[4];
    need(4, reinterpret_cast<char*>(b));
    return b[0] | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
           (std::uint32_t{b[3]} << 24);
  }
  std::uint64_t u64() {
    unsigned char b[8];
    need(8, reinterpret_cast<char*>(b));
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= std::uint64_t{b[i]} << (8 * i);
    return x;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
  }
  std::string str(std::uint32_t max_len = (1u << 26)) {
    const std::uint32_t n = u32();
    if (n > max_len)
      throw io_error(std::string("corrupt ") + what_ + " (bad string): " + path_);
    std::string s(n, '\0');
    if (n) need(n, s.data());
    return s;
  }
  std::vector<double> doubles(std::uint64_t n) {
    std::vector<double> xs(n);
    for (std::uint64_t i = 0; i < n; ++i) xs[i] = f64();
    return xs;
  }
  const std::string& path() const { return path_; }
  const char* what() const { return what_; }

 private:
  std::ifstream in_;
  std::string path_;
  const char* what_;
};

}  // namespace lowlight
