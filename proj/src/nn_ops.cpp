#include "lowlight/nn_ops.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace lowlight::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConst = Eigen::Map<const RowMat>;

// col is (cin*k*k) x (ho*wo), row-major: row (ci*k + ky)*k + kx holds the
// input value seen by kernel tap (ky,kx) at every output position.
void im2col(const Tensor& x, int k, int stride, int pad, int ho, int wo,
            double* col) {
  const int h = x.h, w = x.w;
  for (int ci = 0; ci < x.c; ++ci) {
    const double* plane = x.plane(ci);
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        double* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) *
                                (static_cast<std::size_t>(ho) * wo);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < wo; ++ox) row[oy * wo + ox] = 0.0;
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kx;
            row[oy * wo + ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0;
          }
        }
      }
  }
}

// Adjoint of im2col: scatter-adds col entries back onto the input raster.
void col2im_add(const double* col, int cin, int k, int stride, int pad, int ho,
                int wo, Tensor& dx) {
  const int h = dx.h, w = dx.w;
  for (int ci = 0; ci < cin; ++ci) {
    double* plane = dx.plane(ci);
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        const double* row =
            col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) *
                      (static_cast<std::size_t>(ho) * wo);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          double* dst = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < w) dst[ix] += row[oy * wo + ox];
          }
        }
      }
  }
}

}  // namespace

Tensor conv_forward(const Tensor& x, const ConvSpec& s, const double* w,
                    const double* b) {
  if (x.c != s.cin) throw input_error("conv_forward: channel mismatch");
  const int ho = conv_out_dim(x.h, s.k, s.stride, s.pad);
  const int wo = conv_out_dim(x.w, s.k, s.stride, s.pad);
  if (ho <= 0 || wo <= 0) throw input_error("conv_forward: output collapses");
  Tensor y(s.cout, ho, wo);
  const std::size_t patch = static_cast<std::size_t>(s.cin) * s.k * s.k;
  const std::size_t cols = static_cast<std::size_t>(ho) * wo;
  std::vector<double> col(patch * cols);
  im2col(x, s.k, s.stride, s.pad, ho, wo, col.data());
  MapMat ym(y.v.data(), s.cout, cols);
  MapConst wm(w, s.cout, patch);
  MapConst cm(col.data(), patch, cols);
  ym.noalias() = wm * cm;
  if (b)
    for (int co = 0; co < s.cout; ++co) ym.row(co).array() += b[co];
  return y;
}

Tensor conv_backward_input(const Tensor& dy, const ConvSpec& s, const double* w,
                           int hin, int win) {
  if (dy.c != s.cout) throw input_error("conv_backward_input: channel mismatch");
  const std::size_t patch = static_cast<std::size_t>(s.cin) * s.k * s.k;
  const std::size_t cols = static_cast<std::size_t>(dy.h) * dy.w;
  std::vector<double> dcol(patch * cols);
  MapMat dcm(dcol.data(), patch, cols);
  MapConst wm(w, s.cout, patch);
  MapConst dym(dy.v.data(), s.cout, cols);
  dcm.noalias() = wm.transpose() * dym;
  Tensor dx(s.cin, hin, win, 0.0);
  col2im_add(dcol.data(), s.cin, s.k, s.stride, s.pad, dy.h, dy.w, dx);
  return dx;
}

void conv_backward_params(const Tensor& x, const Tensor& dy, const ConvSpec& s,
                          double* dw, double* db) {
  const std::size_t patch = static_cast<std::size_t>(s.cin) * s.k * s.k;
  const std::size_t cols = static_cast<std::size_t>(dy.h) * dy.w;
  std::vector<double> col(patch * cols);
  im2col(x, s.k, s.stride, s.pad, dy.h, dy.w, col.data());
  MapMat dwm(dw, s.cout, patch);
  MapConst dym(dy.v.data(), s.cout, cols);
  MapConst cm(col.data(), patch, cols);
  dwm.noalias() += dym * cm.transpose();
  if (db)
    for (int co = 0; co < s.cout; ++co) db[co] += dym.row(co).sum();
}

Tensor deconv_forward(const Tensor& x_low, const ConvSpec& adj, const double* w,
                      const double* b) {
  Tensor y = conv_backward_input(x_low, adj, w, 2 * x_low.h, 2 * x_low.w);
  if (b) {
    for (int co = 0; co < y.c; ++co) {
      double* plane = y.plane(co);
      const std::size_t n = static_cast<std::size_t>(y.h) * y.w;
      for (std::size_t i = 0; i < n; ++i) plane[i] += b[co];
    }
  }
  return y;
}

Tensor deconv_backward_input(const Tensor& dy_high, const ConvSpec& adj,
                             const double* w) {
  return conv_forward(dy_high, adj, w, nullptr);
}

void deconv_backward_params(const Tensor& dy_high, const Tensor& x_low,
                            const ConvSpec& adj, double* dw, double* db) {
  conv_backward_params(dy_high, x_low, adj, dw, nullptr);
  if (db) {
    for (int co = 0; co < dy_high.c; ++co) {
      const double* plane = dy_high.plane(co);
      const std::size_t n = static_cast<std::size_t>(dy_high.h) * dy_high.w;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += plane[i];
      db[co] += s;
    }
  }
}

void relu_(Tensor& t) {
  for (double& x : t.v)
    if (x < 0.0) x = 0.0;
}

Tensor sigmoid(const Tensor& t) {
  Tensor y = t;
  for (double& x : y.v) x = 1.0 / (1.0 + std::exp(-x));
  return y;
}

Tensor tanh_map(const Tensor& t) {
  Tensor y = t;
  for (double& x : y.v) x = std::tanh(x);
  return y;
}

Tensor relu_backward(const Tensor& y, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (y.v[i] <= 0.0) dx.v[i] = 0.0;
  return dx;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& dy) {
  Tensor dz = dy;
  for (std::size_t i = 0; i < dz.size(); ++i)
    dz.v[i] *= y.v[i] * (1.0 - y.v[i]);
  return dz;
}

Tensor tanh_backward(const Tensor& y, const Tensor& dy) {
  Tensor dz = dy;
  for (std::size_t i = 0; i < dz.size(); ++i) dz.v[i] *= 1.0 - y.v[i] * y.v[i];
  return dz;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.h != b.h || a.w != b.w) throw input_error("concat: spatial mismatch");
  Tensor y(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + a.v.size());
  return y;
}

}  // namespace lowlight::nn
