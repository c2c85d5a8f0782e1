#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "lowlight/rng.hpp"
#include "lowlight/tensor.hpp"

namespace testutil {

/// Synthetic natural-ish image: low-frequency illumination, a few soft-edged
/// shapes, mild texture, slight per-channel tint. Values in [0.03, 0.97].
inline lowlight::Image synth_image(std::uint64_t seed, int h, int w,
                                   int channels = 3) {
  lowlight::Rng rng(seed);
  const double fy = rng.uniform(0.5, 2.0), fx = rng.uniform(0.5, 2.0);
  const double phase = rng.uniform(0.0, 6.283);
  struct Blob {
    double cy, cx, ry, rx, amp;
  };
  std::vector<Blob> blobs;
  const int n_blobs = 3 + static_cast<int>(rng.uniform_int(3));
  for (int i = 0; i < n_blobs; ++i)
    blobs.push_back({rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9),
                     rng.uniform(0.05, 0.25), rng.uniform(0.05, 0.25),
                     rng.uniform(-0.3, 0.4)});
  const double tfy = rng.uniform(6.0, 14.0), tfx = rng.uniform(6.0, 14.0);

  lowlight::Image img(channels, h, w);
  std::vector<double> tint(channels), offset(channels);
  for (int c = 0; c < channels; ++c) {
    tint[c] = channels == 1 ? 1.0 : rng.uniform(0.88, 1.12);
    offset[c] = channels == 1 ? 0.0 : rng.uniform(-0.03, 0.03);
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = static_cast<double>(y) / h;
      const double v = static_cast<double>(x) / w;
      double base = 0.45 + 0.22 * std::sin(6.283 * (fy * u + fx * v) + phase);
      for (const auto& b : blobs) {
        const double d = (u - b.cy) * (u - b.cy) / (b.ry * b.ry) +
                         (v - b.cx) * (v - b.cx) / (b.rx * b.rx);
        if (d < 1.0) base += b.amp * (1.0 - d) * (1.0 - d);
      }
      base += 0.04 * std::sin(6.283 * tfy * u) * std::cos(6.283 * tfx * v);
      for (int c = 0; c < channels; ++c)
        img.at(c, y, x) = std::clamp(base * tint[c] + offset[c], 0.03, 0.97);
    }
  return img;
}

/// Uniform random tensor in [lo, hi), deterministic per seed.
inline lowlight::Tensor random_tensor(std::uint64_t seed, int c, int h, int w,
                                      double lo = 0.0, double hi = 1.0) {
  lowlight::Rng rng(seed);
  lowlight::Tensor t(c, h, w);
  for (double& x : t.v) x = rng.uniform(lo, hi);
  return t;
}

/// Self-deleting unique temporary directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "lowlight") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
