#pragma once

#include <cstdint>
#include <vector>

#include "lowlight/tensor.hpp"

namespace lowlight {

/// Expected photon count corresponding to unit intensity. With s = 1 the
/// photon-count picture coincides with normalized intensities; the default
/// elsewhere in the toolkit is s = 255 (one 8-bit step ~ one photon).
struct PhotonScale {
  double s;
  explicit PhotonScale(double s_) : s(s_) {
    if (!(s > 0.0)) throw input_error("photon scale must be positive");
  }
};

/// Multiplicative illumination attenuation in (0, 1].
struct ExposureLevel {
  double e;
  explicit ExposureLevel(double e_) : e(e_) {
    if (!(e > 0.0 && e <= 1.0))
      throw input_error("exposure level must lie in (0, 1]");
  }
};

/// Photon-limited degradation: per element draws k ~ Poisson(s*e*x) and
/// returns k/s. Output is non-negative, may exceed 1 and is left unclipped;
/// E[out] = e*x and Var[out] = e*x/s. Deterministic per seed.
Image simulate_low_light(const Image& x, ExposureLevel e, PhotonScale s,
                         std::uint64_t seed);

/// Stochastic noise-loss target: per element draws k ~ Poisson(s*y) and
/// returns k/(s*y + alpha). With s = 1 this is the literal ratio
/// Poisson(Y)/(Y + alpha) on normalized intensities.
Image noise_target(const Image& y, PhotonScale s, double alpha,
                   std::uint64_t seed);

/// Diagnostic multiplicative residual y/(x + alpha), element-wise.
Image multiplicative_residual(const Image& y, const Image& x, double alpha);

/// Geometric ladder of exposure levels, head 0.30, ratio 1/2:
/// n = 4 gives {0.30, 0.15, 0.075, 0.0375}.
std::vector<ExposureLevel> level_ladder(int n_levels);

}  // namespace lowlight
