#include "lowlight/niqe.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lowlight/binio.hpp"

namespace lowlight {

namespace {

// 7-tap Gaussian (sigma 7/6) used by the MSCN local statistics.
std::array<double, 7> mscn_window() {
  std::array<double, 7> g{};
  const double sigma = 7.0 / 6.0;
  double sum = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double d = i - 3.0;
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += g[i];
  }
  for (double& x : g) x /= sum;
  return g;
}

// Separable filtering with replicate edges, same-size output.
Tensor filter_replicate(const Tensor& m) {
  static const auto g = mscn_window();
  Tensor tmp(1, m.h, m.w), out(1, m.h, m.w);
  for (int y = 0; y < m.h; ++y)
    for (int x = 0; x < m.w; ++x) {
      double s = 0.0;
      for (int k = 0; k < 7; ++k)
        s += g[k] * m.at(0, y, std::clamp(x + k - 3, 0, m.w - 1));
      tmp.at(0, y, x) = s;
    }
  for (int y = 0; y < m.h; ++y)
    for (int x = 0; x < m.w; ++x) {
      double s = 0.0;
      for (int k = 0; k < 7; ++k)
        s += g[k] * tmp.at(0, std::clamp(y + k - 3, 0, m.h - 1), x);
      out.at(0, y, x) = s;
    }
  return out;
}

struct MscnField {
  Tensor mscn;   // mean-subtracted contrast-normalized coefficients
  Tensor sigma;  // local deviation field, the sharpness signal
};

// Works on 0..255-scaled intensities; the +1 stabilizer matches that scale.
MscnField mscn_field(const Tensor& gray255) {
  const Tensor mu = filter_replicate(gray255);
  Tensor sq = gray255;
  for (double& x : sq.v) x *= x;
  const Tensor musq = filter_replicate(sq);
  MscnField f{Tensor(1, gray255.h, gray255.w), Tensor(1, gray255.h, gray255.w)};
  for (std::size_t i = 0; i < gray255.size(); ++i) {
    const double var = musq.v[i] - mu.v[i] * mu.v[i];
    const double sigma = std::sqrt(std::abs(var));
    f.sigma.v[i] = sigma;
    f.mscn.v[i] = (gray255.v[i] - mu.v[i]) / (sigma + 1.0);
  }
  return f;
}

Tensor downsample2(const Tensor& m) {
  const int h = m.h / 2, w = m.w / 2;
  Tensor out(1, h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(0, y, x) = 0.25 * (m.at(0, 2 * y, 2 * x) + m.at(0, 2 * y, 2 * x + 1) +
                                m.at(0, 2 * y + 1, 2 * x) +
                                m.at(0, 2 * y + 1, 2 * x + 1));
  return out;
}

struct AggdFit {
  double alpha, sigma_l, sigma_r;
};

// Moment-matching grid for the asymmetric generalized Gaussian shape.
const std::vector<double>& rho_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t;
    t.reserve(9800);
    for (double gam = 0.2; gam < 10.0; gam += 0.001)
      t.push_back(std::tgamma(2.0 / gam) * std::tgamma(2.0 / gam) /
                  (std::tgamma(1.0 / gam) * std::tgamma(3.0 / gam)));
    return t;
  }();
  return table;
}

AggdFit aggd_fit(const std::vector<double>& x) {
  double neg_sq = 0.0, pos_sq = 0.0, abs_sum = 0.0;
  std::size_t neg_n = 0, pos_n = 0;
  for (double v : x) {
    if (v < 0.0) {
      neg_sq += v * v;
      ++neg_n;
      abs_sum -= v;
    } else if (v > 0.0) {
      pos_sq += v * v;
      ++pos_n;
      abs_sum += v;
    }
  }
  const double sl = neg_n ? std::sqrt(neg_sq / neg_n) : 0.0;
  const double sr = pos_n ? std::sqrt(pos_sq / pos_n) : 0.0;
  if (sl == 0.0 && sr == 0.0) return {2.0, 0.0, 0.0};  // flat input

  const double gamma_hat = (sl + 1e-12) / (sr + 1e-12);
  const double n = static_cast<double>(x.size());
  const double r_hat = (abs_sum / n) * (abs_sum / n) / ((neg_sq + pos_sq) / n);
  const double r_norm = r_hat * (gamma_hat * gamma_hat * gamma_hat + 1.0) *
                        (gamma_hat + 1.0) /
                        ((gamma_hat * gamma_hat + 1.0) *
                         (gamma_hat * gamma_hat + 1.0));

  const auto& table = rho_table();
  std::size_t best = 0;
  double best_diff = std::abs(table[0] - r_norm);
  for (std::size_t i = 1; i < table.size(); ++i) {
    const double diff = std::abs(table[i] - r_norm);
    if (diff < best_diff) {
      best_diff = diff;
      best = i;
    }
  }
  return {0.2 + 0.001 * static_cast<double>(best), sl, sr};
}

// 18 features for one scale: AGGD of the MSCN slice (2), then AGGD of the
// four orientation products over their valid offsets (4 x 4).
void append_scale_features(const Tensor& mscn, int y0, int x0, int size,
                           std::vector<double>& feats) {
  std::vector<double> slice;
  slice.reserve(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) slice.push_back(mscn.at(0, y0 + y, x0 + x));

  const AggdFit base = aggd_fit(slice);
  feats.push_back(base.alpha);
  feats.push_back((base.sigma_l * base.sigma_l + base.sigma_r * base.sigma_r) /
                  2.0);

  static constexpr int shifts[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  std::vector<double> prod;
  for (const auto& sh : shifts) {
    prod.clear();
    for (int y = 0; y < size; ++y) {
      const int yy = y + sh[0];
      if (yy < 0 || yy >= size) continue;
      for (int x = 0; x < size; ++x) {
        const int xx = x + sh[1];
        if (xx < 0 || xx >= size) continue;
        prod.push_back(mscn.at(0, y0 + y, x0 + x) * mscn.at(0, y0 + yy, x0 + xx));
      }
    }
    const AggdFit f = aggd_fit(prod);
    const double mean_param =
        (f.sigma_r - f.sigma_l) *
        (std::tgamma(2.0 / f.alpha) / std::tgamma(1.0 / f.alpha)) *
        std::sqrt(std::tgamma(1.0 / f.alpha) / std::tgamma(3.0 / f.alpha));
    feats.push_back(f.alpha);
    feats.push_back(mean_param);
    feats.push_back(f.sigma_l * f.sigma_l);
    feats.push_back(f.sigma_r * f.sigma_r);
  }
}

struct PatchSet {
  std::vector<std::vector<double>> features;  // each 36-dim
  std::vector<double> sharpness;              // per patch
};

PatchSet image_patches(const Image& img, int patch) {
  Tensor gray = luma601(img);
  for (double& x : gray.v) x *= 255.0;
  const MscnField scale1 = mscn_field(gray);
  const MscnField scale2 = mscn_field(downsample2(gray));

  PatchSet set;
  const int rows = img.h / patch, cols = img.w / patch;
  for (int py = 0; py < rows; ++py)
    for (int px = 0; px < cols; ++px) {
      std::vector<double> feats;
      feats.reserve(kNiqeFeatureDim);
      append_scale_features(scale1.mscn, py * patch, px * patch, patch, feats);
      append_scale_features(scale2.mscn, py * patch / 2, px * patch / 2,
                            patch / 2, feats);
      double sharp = 0.0;
      for (int y = 0; y < patch; ++y)
        for (int x = 0; x < patch; ++x)
          sharp += scale1.sigma.at(0, py * patch + y, px * patch + x);
      set.features.push_back(std::move(feats));
      set.sharpness.push_back(sharp / (static_cast<double>(patch) * patch));
    }
  return set;
}

void fit_gaussian(const std::vector<std::vector<double>>& feats,
                  std::array<double, kNiqeFeatureDim>& mean,
                  std::vector<double>& cov) {
  const double n = static_cast<double>(feats.size());
  mean.fill(0.0);
  for (const auto& f : feats)
    for (int j = 0; j < kNiqeFeatureDim; ++j) mean[j] += f[j] / n;
  cov.assign(kNiqeFeatureDim * kNiqeFeatureDim, 0.0);
  if (feats.size() < 2) return;
  for (const auto& f : feats)
    for (int i = 0; i < kNiqeFeatureDim; ++i)
      for (int j = i; j < kNiqeFeatureDim; ++j)
        cov[i * kNiqeFeatureDim + j] += (f[i] - mean[i]) * (f[j] - mean[j]);
  for (int i = 0; i < kNiqeFeatureDim; ++i)
    for (int j = i; j < kNiqeFeatureDim; ++j) {
      cov[i * kNiqeFeatureDim + j] /= (n - 1.0);
      cov[j * kNiqeFeatureDim + i] = cov[i * kNiqeFeatureDim + j];
    }
}

constexpr char kNiqeMagic[8] = {'N', 'I', 'Q', 'M', '0', '0', '0', '1'};

}  // namespace

NiqeModel fit_niqe_model(const std::vector<Image>& pristine, int patch,
                         double sharpness_quantile) {
  if (patch < 16 || patch % 2 != 0)
    throw input_error("fit_niqe_model: patch must be an even size >= 16");
  if (!(sharpness_quantile >= 0.0 && sharpness_quantile < 1.0))
    throw input_error("fit_niqe_model: quantile must lie in [0,1)");
  if (pristine.size() < 10)
    throw input_error("fit_niqe_model: need at least 10 pristine images (got " +
                      std::to_string(pristine.size()) + ")");

  std::vector<std::vector<double>> kept;
  for (const auto& img : pristine) {
    if (img.h < patch || img.w < patch) continue;  // unusable, no patches fit
    PatchSet set = image_patches(img, patch);
    if (set.features.empty()) continue;
    std::vector<double> sorted = set.sharpness;
    std::sort(sorted.begin(), sorted.end());
    const auto qi = static_cast<std::size_t>(
        std::floor(sharpness_quantile * (sorted.size() - 1)));
    const double threshold = sorted[qi];
    for (std::size_t p = 0; p < set.features.size(); ++p)
      if (set.sharpness[p] >= threshold)
        kept.push_back(std::move(set.features[p]));
  }
  if (kept.size() < 10)
    throw input_error("fit_niqe_model: too few usable patches (" +
                      std::to_string(kept.size()) + ")");

  NiqeModel model;
  model.patch = patch;
  model.sharpness_quantile = sharpness_quantile;
  fit_gaussian(kept, model.mean, model.covariance);
  return model;
}

double niqe(const Image& img, const NiqeModel& model) {
  if (model.covariance.size() !=
      static_cast<std::size_t>(kNiqeFeatureDim) * kNiqeFeatureDim)
    throw input_error("niqe: malformed model covariance");
  if (img.h < 2 * model.patch || img.w < 2 * model.patch)
    throw input_error("niqe: image smaller than 2x the model patch size");

  PatchSet set = image_patches(img, model.patch);
  std::array<double, kNiqeFeatureDim> mean2{};
  std::vector<double> cov2;
  fit_gaussian(set.features, mean2, cov2);

  using Mat = Eigen::Matrix<double, kNiqeFeatureDim, kNiqeFeatureDim>;
  using Vec = Eigen::Matrix<double, kNiqeFeatureDim, 1>;
  Mat sigma;
  for (int i = 0; i < kNiqeFeatureDim; ++i)
    for (int j = 0; j < kNiqeFeatureDim; ++j)
      sigma(i, j) = 0.5 * (model.covariance[i * kNiqeFeatureDim + j] +
                           cov2[i * kNiqeFeatureDim + j]);
  const double ridge =
      1e-6 * sigma.trace() / kNiqeFeatureDim + 1e-12;
  sigma += ridge * Mat::Identity();

  Vec d;
  for (int i = 0; i < kNiqeFeatureDim; ++i) d(i) = model.mean[i] - mean2[i];
  const Vec solved = sigma.ldlt().solve(d);
  return std::sqrt(std::max(0.0, d.dot(solved)));
}

void save_niqe_model(const NiqeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open NIQE model for writing: " + path);
  out.write(kNiqeMagic, 8);
  put_u32(out, kNiqeModelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(model.patch));
  put_f64(out, model.sharpness_quantile);
  for (double x : model.mean) put_f64(out, x);
  put_doubles(out, model.covariance);
  if (!out) throw io_error("NIQE model write failed: " + path);
}

NiqeModel load_niqe_model(const std::string& path) {
  BinReader r(path, "NIQE model");
  char magic[8];
  r.need(8, magic);
  if (std::memcmp(magic, kNiqeMagic, 8) != 0)
    throw io_error("corrupt NIQE model (bad magic): " + path);
  const std::uint32_t version = r.u32();
  if (version != kNiqeModelFormatVersion)
    throw io_error("NIQE model format version " + std::to_string(version) +
                   " is not supported: " + path);
  NiqeModel model;
  model.patch = static_cast<int>(r.u32());
  model.sharpness_quantile = r.f64();
  for (double& x : model.mean) x = r.f64();
  model.covariance = r.doubles(kNiqeFeatureDim * kNiqeFeatureDim);
  return model;
}

}  // namespace lowlight
