#include "lowlight/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include "lowlight/dataset.hpp"
#include "lowlight/image_io.hpp"

namespace lowlight {

double psnr(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw input_error("psnr: shape mismatch");
  if (!(peak > 0.0)) throw input_error("psnr: peak must be positive");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

constexpr int kWin = 11;

std::array<double, kWin> gaussian_window() {
  std::array<double, kWin> g{};
  const double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2.0;
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += g[i];
  }
  for (double& x : g) x /= sum;
  return g;
}

// Separable valid-mode filtering: output is (h-10) x (w-10).
Tensor filter_valid(const Tensor& m) {
  static const auto g = gaussian_window();
  const int hw = m.w - kWin + 1;
  Tensor tmp(1, m.h, hw);
  for (int y = 0; y < m.h; ++y)
    for (int x = 0; x < hw; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWin; ++k) s += g[k] * m.at(0, y, x + k);
      tmp.at(0, y, x) = s;
    }
  const int hh = m.h - kWin + 1;
  Tensor out(1, hh, hw);
  for (int y = 0; y < hh; ++y)
    for (int x = 0; x < hw; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWin; ++k) s += g[k] * tmp.at(0, y + k, x);
      out.at(0, y, x) = s;
    }
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.v[i] *= b.v[i];
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw input_error("ssim: shape mismatch");
  if (a.h < kWin || a.w < kWin)
    throw input_error("ssim: image smaller than the 11x11 window");
  const Tensor x = luma601(a);
  const Tensor y = luma601(b);

  const Tensor mu1 = filter_valid(x);
  const Tensor mu2 = filter_valid(y);
  const Tensor xx = filter_valid(hadamard(x, x));
  const Tensor yy = filter_valid(hadamard(y, y));
  const Tensor xy = filter_valid(hadamard(x, y));

  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    const double m1 = mu1.v[i], m2 = mu2.v[i];
    const double s11 = xx.v[i] - m1 * m1;
    const double s22 = yy.v[i] - m2 * m2;
    const double s12 = xy.v[i] - m1 * m2;
    acc += ((2.0 * m1 * m2 + c1) * (2.0 * s12 + c2)) /
           ((m1 * m1 + m2 * m2 + c1) * (s11 + s22 + c2));
  }
  return acc / static_cast<double>(mu1.size());
}

namespace {

std::vector<double> channel_histogram(const Image& img, int ch, int bins) {
  std::vector<double> h(bins, 0.0);
  const double* p = img.plane(ch);
  const std::size_t n = static_cast<std::size_t>(img.h) * img.w;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::clamp(p[i], 0.0, 1.0);
    const int b = std::min(bins - 1, static_cast<int>(v * bins));
    h[b] += 1.0;
  }
  for (double& x : h) x /= static_cast<double>(n);
  return h;
}

}  // namespace

double color_divergence(const Image& img, int bins) {
  if (img.c != 3) throw input_error("color_divergence: needs a 3-channel image");
  if (bins < 1) throw input_error("color_divergence: bins must be positive");
  const auto hr = channel_histogram(img, 0, bins);
  const auto hg = channel_histogram(img, 1, bins);
  const auto hb = channel_histogram(img, 2, bins);
  auto l1 = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < bins; ++i) s += std::abs(u[i] - v[i]);
    return s;
  };
  return (l1(hr, hg) + l1(hr, hb) + l1(hg, hb)) / 3.0;
}

Image baseline_gamma(const Image& img, double g) {
  if (!(g > 0.0)) throw input_error("baseline_gamma: exponent must be positive");
  Image out = img;
  for (double& x : out.v) x = std::pow(std::clamp(x, 0.0, 1.0), g);
  return out;
}

Image baseline_histeq(const Image& img) {
  constexpr int kBins = 256;
  Image out = img;
  const std::size_t n = static_cast<std::size_t>(img.h) * img.w;
  for (int c = 0; c < img.c; ++c) {
    const double* src = img.plane(c);
    double* dst = out.plane(c);
    std::array<double, kBins> counts{};
    auto bin_of = [&](double v) {
      return std::min(kBins - 1,
                      static_cast<int>(std::clamp(v, 0.0, 1.0) * kBins));
    };
    for (std::size_t i = 0; i < n; ++i) counts[bin_of(src[i])] += 1.0;
    std::array<double, kBins> cdf{};
    double running = 0.0;
    for (int b = 0; b < kBins; ++b) {
      running += counts[b];
      cdf[b] = running;
    }
    double cdf_min = 0.0;
    for (int b = 0; b < kBins; ++b)
      if (counts[b] > 0.0) {
        cdf_min = cdf[b];
        break;
      }
    const double denom = static_cast<double>(n) - cdf_min;
    if (denom <= 0.0) continue;  // constant channel, nothing to equalize
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = std::clamp((cdf[bin_of(src[i])] - cdf_min) / denom, 0.0, 1.0);
  }
  return out;
}

MetricsReport evaluate(const std::string& output_dir,
                       const std::string& reference_dir,
                       const NiqeModel* niqe_model) {
  const auto outs = list_raster_stems(output_dir);
  const auto refs = list_raster_stems(reference_dir);

  std::vector<std::string> missing;
  for (const auto& [stem, path] : outs)
    if (!refs.count(stem)) missing.push_back(stem + " (no reference)");
  for (const auto& [stem, path] : refs)
    if (!outs.count(stem)) missing.push_back(stem + " (no output)");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += "\n  " + m;
    throw input_error("evaluate: id mismatch between directories:" + list);
  }
  if (outs.empty()) throw input_error("evaluate: no images to score");

  MetricsReport report;
  for (const auto& [stem, out_path] : outs) {
    const Image out = load_image(out_path);
    const Image ref = load_image(refs.at(stem));
    MetricsRow row;
    row.id = stem;
    row.psnr_db = psnr(out, ref);
    row.ssim = ssim(out, ref);
    if (niqe_model) row.niqe = niqe(out, *niqe_model);
    row.color_divergence = out.c == 3 ? color_divergence(out) : 0.0;
    report.rows.push_back(std::move(row));
  }

  const double inv = 1.0 / static_cast<double>(report.rows.size());
  double niqe_sum = 0.0;
  for (const auto& row : report.rows) {
    report.mean_psnr_db += row.psnr_db * inv;
    report.mean_ssim += row.ssim * inv;
    report.mean_color_divergence += row.color_divergence * inv;
    if (row.niqe) niqe_sum += *row.niqe * inv;
  }
  if (niqe_model) report.mean_niqe = niqe_sum;
  return report;
}

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write metrics CSV: " + path);
  const bool with_niqe = report.mean_niqe.has_value();
  out << (with_niqe ? "id,psnr_db,ssim,niqe,color_divergence\n"
                    : "id,psnr_db,ssim,color_divergence\n");
  out.precision(10);
  for (const auto& row : report.rows) {
    out << row.id << ',' << row.psnr_db << ',' << row.ssim << ',';
    if (with_niqe) out << row.niqe.value_or(0.0) << ',';
    out << row.color_divergence << '\n';
  }
  if (!out) throw io_error("metrics CSV write failed: " + path);
}

}  // namespace lowlight
