#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lowlight/tensor.hpp"

namespace lowlight {

inline constexpr int kNiqeFeatureDim = 36;
inline constexpr std::uint32_t kNiqeModelFormatVersion = 1;

/// Natural-scene-statistics model: mean and covariance of 36-dimensional
/// patch features (AGGD fits of MSCN coefficients and their four paired
/// products, at two scales) over a pristine corpus.
struct NiqeModel {
  std::array<double, kNiqeFeatureDim> mean{};
  std::vector<double> covariance;  // 36x36, row-major, symmetric PSD
  int patch = 96;
  double sharpness_quantile = 0.75;
};

/// Fits the pristine model: extracts per-patch features from every image,
/// keeps each image's patches whose local-sharpness score is at or above the
/// given quantile, and fits the sample mean and covariance. Requires at
/// least 10 images and at least 10 usable patches.
NiqeModel fit_niqe_model(const std::vector<Image>& pristine, int patch = 96,
                         double sharpness_quantile = 0.75);

/// Quality score (lower is better): Mahalanobis-style distance between the
/// pristine model and a Gaussian fitted to all of the image's patch
/// features. A small ridge (1e-6 * trace/36) stabilizes the inversion.
/// Requires both image dimensions >= 2 * patch.
double niqe(const Image& img, const NiqeModel& model);

/// Binary container: magic "NIQM0001", u32 version, u32 patch size, f64
/// sharpness quantile, 36 f64 means, 36*36 f64 covariance (little-endian).
void save_niqe_model(const NiqeModel& model, const std::string& path);
NiqeModel load_niqe_model(const std::string& path);

}  // namespace lowlight
