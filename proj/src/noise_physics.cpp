#include "lowlight/noise_physics.hpp"

#include <string>

#include "lowlight/rng.hpp"

namespace lowlight {

Image simulate_low_light(const Image& x, ExposureLevel e, PhotonScale s,
                         std::uint64_t seed) {
  Rng rng(seed);
  Image out(x.c, x.h, x.w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.v[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw input_error("simulate_low_light: input values must lie in [0,1]");
    out.v[i] = static_cast<double>(rng.poisson(s.s * e.e * v)) / s.s;
  }
  return out;
}

Image noise_target(const Image& y, PhotonScale s, double alpha,
                   std::uint64_t seed) {
  if (!(alpha > 0.0)) throw input_error("noise_target: alpha must be positive");
  Rng rng(seed);
  Image out(y.c, y.h, y.w);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double rate = s.s * y.v[i];
    if (!(rate >= 0.0))
      throw input_error("noise_target: image values must be non-negative");
    out.v[i] = static_cast<double>(rng.poisson(rate)) / (rate + alpha);
  }
  return out;
}

Image multiplicative_residual(const Image& y, const Image& x, double alpha) {
  if (!y.same_shape(x))
    throw input_error("multiplicative_residual: shape mismatch");
  Image out(y.c, y.h, y.w);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(x.v[i] >= 0.0))
      throw input_error("multiplicative_residual: x must be non-negative");
    out.v[i] = y.v[i] / (x.v[i] + alpha);
  }
  return out;
}

std::vector<ExposureLevel> level_ladder(int n_levels) {
  if (n_levels < 1) throw input_error("level_ladder: need at least one level");
  std::vector<ExposureLevel> ladder;
  double e = 0.30;
  for (int i = 0; i < n_levels; ++i, e *= 0.5)
    ladder.push_back(ExposureLevel(e));
  return ladder;
}

}  // namespace lowlight
