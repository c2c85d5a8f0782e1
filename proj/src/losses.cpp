#include "lowlight/losses.hpp"

#include <cmath>

namespace lowlight {

namespace {

inline double sign(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

void check_triple(const DecompositionTriple& t) {
  if (t.L.c != 1 || t.R.c != 3 || t.N.c != 3)
    throw input_error("triple must have 1/3/3 channels");
  if (t.L.h != t.R.h || t.L.w != t.R.w || !t.R.same_shape(t.N))
    throw input_error("triple components disagree on spatial size");
}

void check_image_like(const Tensor& img, const DecompositionTriple& t,
                      const char* what) {
  if (img.c != 3 || img.h != t.L.h || img.w != t.L.w)
    throw input_error(std::string(what) + ": shape mismatch with triple");
}

// Adjoint of the forward difference along x (last column zeroed).
void scatter_dx(const Tensor& g, int ci, Tensor& dmap, int dci, double scale) {
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x + 1 < g.w; ++x) {
      const double v = scale * g.at(ci, y, x);
      dmap.at(dci, y, x + 1) += v;
      dmap.at(dci, y, x) -= v;
    }
}

void scatter_dy(const Tensor& g, int ci, Tensor& dmap, int dci, double scale) {
  for (int y = 0; y + 1 < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      const double v = scale * g.at(ci, y, x);
      dmap.at(dci, y + 1, x) += v;
      dmap.at(dci, y, x) -= v;
    }
}

double rec_impl(const Tensor& y, const DecompositionTriple& t, double weight,
                Tensor* dL, Tensor* dR, Tensor* dN) {
  const double inv_n = 1.0 / static_cast<double>(y.size());
  double acc = 0.0;
  const int hw = y.h * y.w;
  for (int c = 0; c < 3; ++c) {
    const double* rp = t.R.plane(c);
    const double* np = t.N.plane(c);
    const double* lp = t.L.plane(0);
    const double* yp = y.plane(c);
    for (int i = 0; i < hw; ++i) {
      const double recon = rp[i] * lp[i] * np[i];
      const double diff = recon - yp[i];
      acc += std::abs(diff);
      if (dL) {
        const double g = weight * sign(diff) * inv_n;
        dL->plane(0)[i] += g * rp[i] * np[i];
        dR->plane(c)[i] += g * lp[i] * np[i];
        dN->plane(c)[i] += g * rp[i] * lp[i];
      }
    }
  }
  return acc * inv_n;
}

double decom_impl(const Tensor& x, const DecompositionTriple& t, double weight,
                  Tensor* dL, Tensor* dR) {
  const double inv_n = 1.0 / static_cast<double>(x.size());
  double acc = 0.0;
  const int hw = x.h * x.w;
  for (int c = 0; c < 3; ++c) {
    const double* rp = t.R.plane(c);
    const double* lp = t.L.plane(0);
    const double* xp = x.plane(c);
    for (int i = 0; i < hw; ++i) {
      const double diff = rp[i] * lp[i] - xp[i];
      acc += std::abs(diff);
      if (dL) {
        const double g = weight * sign(diff) * inv_n;
        dL->plane(0)[i] += g * rp[i];
        dR->plane(c)[i] += g * lp[i];
      }
    }
  }
  return acc * inv_n;
}

double sps_impl(const DecompositionTriple& t, double beta, double weight,
                Tensor* dL, Tensor* dR) {
  const auto [gxL, gyL] = grad_xy(t.L);
  const auto [gxR, gyR] = grad_xy(t.R);
  const int h = t.L.h, w = t.L.w;
  const double inv_n = 1.0 / (2.0 * h * w);

  // One direction at a time; gL is 1-channel, gR 3-channel.
  double acc = 0.0;
  auto run = [&](const Tensor& gL, const Tensor& gR, bool is_x) {
    Tensor dgL, dgR;
    if (dL) {
      dgL = Tensor(1, h, w, 0.0);
      dgR = Tensor(3, h, w, 0.0);
    }
    for (int i = 0; i < h * w; ++i) {
      const double mean_abs_r = (std::abs(gR.plane(0)[i]) +
                                 std::abs(gR.plane(1)[i]) +
                                 std::abs(gR.plane(2)[i])) /
                                3.0;
      const double att = std::exp(-beta * mean_abs_r);
      const double al = std::abs(gL.plane(0)[i]);
      acc += al * att;
      if (dL) {
        dgL.plane(0)[i] = sign(gL.plane(0)[i]) * att;
        const double common = -al * att * beta / 3.0;
        for (int c = 0; c < 3; ++c)
          dgR.plane(c)[i] = common * sign(gR.plane(c)[i]);
      }
    }
    if (dL) {
      const double s = weight * inv_n;
      if (is_x) {
        scatter_dx(dgL, 0, *dL, 0, s);
        for (int c = 0; c < 3; ++c) scatter_dx(dgR, c, *dR, c, s);
      } else {
        scatter_dy(dgL, 0, *dL, 0, s);
        for (int c = 0; c < 3; ++c) scatter_dy(dgR, c, *dR, c, s);
      }
    }
  };
  run(gxL, gxR, true);
  run(gyL, gyR, false);
  return acc * inv_n;
}

double noise_impl(const Tensor& n, const Tensor& n_target, double weight,
                  Tensor* dN) {
  const double inv_n = 1.0 / static_cast<double>(n.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double diff = n.v[i] - n_target.v[i];
    acc += std::abs(diff);
    if (dN) dN->v[i] += weight * sign(diff) * inv_n;
  }
  return acc * inv_n;
}

LossBreakdown total_impl(const Tensor& y, const Tensor& x,
                         const DecompositionTriple& t, const Tensor& n_target,
                         const LossWeights& w, Tensor* dL, Tensor* dR,
                         Tensor* dN) {
  check_triple(t);
  check_image_like(y, t, "total_loss: y");
  check_image_like(x, t, "total_loss: x");
  if (!n_target.same_shape(t.N))
    throw input_error("total_loss: noise target shape mismatch");
  LossBreakdown b;
  b.rec = rec_impl(y, t, 1.0, dL, dR, dN);
  b.decom = decom_impl(x, t, w.lambda1 * w.gamma, dL, dR);
  b.sps = sps_impl(t, w.beta, w.lambda1 * (1.0 - w.gamma), dL, dR);
  b.noise = noise_impl(t.N, n_target, w.lambda2, dN);
  b.total = b.rec + w.lambda1 * (w.gamma * b.decom + (1.0 - w.gamma) * b.sps) +
            w.lambda2 * b.noise;
  return b;
}

}  // namespace

std::pair<Tensor, Tensor> grad_xy(const Tensor& map) {
  if (map.h < 2 || map.w < 2)
    throw input_error("grad_xy: needs at least 2x2 spatial extent");
  Tensor gx(map.c, map.h, map.w, 0.0), gy(map.c, map.h, map.w, 0.0);
  for (int c = 0; c < map.c; ++c)
    for (int y = 0; y < map.h; ++y)
      for (int x = 0; x < map.w; ++x) {
        if (x + 1 < map.w) gx.at(c, y, x) = map.at(c, y, x + 1) - map.at(c, y, x);
        if (y + 1 < map.h) gy.at(c, y, x) = map.at(c, y + 1, x) - map.at(c, y, x);
      }
  return {std::move(gx), std::move(gy)};
}

double loss_rec(const Tensor& y, const DecompositionTriple& t) {
  check_triple(t);
  check_image_like(y, t, "loss_rec");
  return rec_impl(y, t, 1.0, nullptr, nullptr, nullptr);
}

double loss_decom(const Tensor& x, const DecompositionTriple& t) {
  check_triple(t);
  check_image_like(x, t, "loss_decom");
  return decom_impl(x, t, 1.0, nullptr, nullptr);
}

double loss_sps(const DecompositionTriple& t, double beta) {
  check_triple(t);
  return sps_impl(t, beta, 1.0, nullptr, nullptr);
}

double loss_noise(const Tensor& n, const Tensor& n_target) {
  if (!n.same_shape(n_target)) throw input_error("loss_noise: shape mismatch");
  return noise_impl(n, n_target, 1.0, nullptr);
}

LossBreakdown total_loss(const Tensor& y, const Tensor& x,
                         const DecompositionTriple& t, const Tensor& n_target,
                         const LossWeights& w) {
  return total_impl(y, x, t, n_target, w, nullptr, nullptr, nullptr);
}

LossBreakdown total_loss_grad(const Tensor& y, const Tensor& x,
                              const DecompositionTriple& t,
                              const Tensor& n_target, const LossWeights& w,
                              Tensor& dL, Tensor& dR, Tensor& dN) {
  dL = Tensor(1, t.L.h, t.L.w, 0.0);
  dR = Tensor(3, t.R.h, t.R.w, 0.0);
  dN = Tensor(3, t.N.h, t.N.w, 0.0);
  return total_impl(y, x, t, n_target, w, &dL, &dR, &dN);
}

}  // namespace lowlight
