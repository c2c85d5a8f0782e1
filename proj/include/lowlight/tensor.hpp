#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lowlight/error.hpp"

namespace lowlight {

/// Planar channel-major raster of doubles: value(c, y, x) = v[(c*h + y)*w + x].
/// Used both for images (1 or 3 channels, nominally in [0,1]) and for network
/// feature maps (arbitrary channel count, arbitrary range).
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_, double fill = 0.0)
      : c(c_), h(h_), w(w_),
        v(static_cast<std::size_t>(c_) * h_ * w_, fill) {
    if (c_ <= 0 || h_ <= 0 || w_ <= 0)
      throw input_error("tensor dimensions must be positive");
  }

  double& at(int ci, int y, int x) {
    return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }
  double at(int ci, int y, int x) const {
    return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }

  /// Pointer to the start of channel ci (a contiguous h*w plane).
  double* plane(int ci) { return v.data() + static_cast<std::size_t>(ci) * h * w; }
  const double* plane(int ci) const {
    return v.data() + static_cast<std::size_t>(ci) * h * w;
  }

  std::size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const {
    return c == o.c && h == o.h && w == o.w;
  }
};

/// Images are tensors with c in {1,3}; that invariant is enforced at the disk
/// boundary (image_io) rather than by the container.
using Image = Tensor;

inline double mean(const Tensor& t) {
  double s = 0.0;
  for (double x : t.v) s += x;
  return t.v.empty() ? 0.0 : s / static_cast<double>(t.v.size());
}

inline bool all_finite(const Tensor& t) {
  return std::all_of(t.v.begin(), t.v.end(),
                     [](double x) { return std::isfinite(x); });
}

inline void clip_(Tensor& t, double lo, double hi) {
  for (double& x : t.v) x = std::clamp(x, lo, hi);
}

inline Tensor clipped(Tensor t, double lo, double hi) {
  clip_(t, lo, hi);
  return t;
}

/// ITU-R 601 luma; identity for single-channel input.
inline Tensor luma601(const Tensor& t) {
  if (t.c == 1) return t;
  if (t.c != 3) throw input_error("luma601: expected 1 or 3 channels");
  Tensor y(1, t.h, t.w);
  const double* r = t.plane(0);
  const double* g = t.plane(1);
  const double* b = t.plane(2);
  for (std::size_t i = 0; i < y.size(); ++i)
    y.v[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return y;
}

}  // namespace lowlight
