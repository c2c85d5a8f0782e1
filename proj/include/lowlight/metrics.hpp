#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lowlight/niqe.hpp"
#include "lowlight/tensor.hpp"

namespace lowlight {

/// 10*log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean local SSIM: 11x11 Gaussian window (sigma 1.5), k1 = 0.01, k2 = 0.03,
/// dynamic range `peak`, computed on ITU-R 601 luma for color inputs.
/// Windows are fully inside the image (valid region), so inputs must be at
/// least 11x11.
double ssim(const Image& a, const Image& b, double peak = 1.0);

/// Mean pairwise L1 distance between the three normalized channel
/// histograms; 0 iff the histograms are identical at this binning.
double color_divergence(const Image& img, int bins = 64);

/// Reference enhancers for comparison tables.
Image baseline_gamma(const Image& img, double g);
Image baseline_histeq(const Image& img);

struct MetricsRow {
  std::string id;
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::optional<double> niqe;
  double color_divergence = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;  // ordered by id
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;
  std::optional<double> mean_niqe;
  double mean_color_divergence = 0.0;
};

/// Scores every id shared by the two directories: PSNR/SSIM of output against
/// reference, NIQE (when a model is supplied) and color divergence of the
/// output. Throws input_error listing unmatched ids.
MetricsReport evaluate(const std::string& output_dir,
                       const std::string& reference_dir,
                       const NiqeModel* niqe_model);

/// metrics.csv with header id,psnr_db,ssim[,niqe],color_divergence.
void write_metrics_csv(const MetricsReport& report, const std::string& path);

}  // namespace lowlight
