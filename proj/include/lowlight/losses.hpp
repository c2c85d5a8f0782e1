#pragma once

#include <utility>

#include "lowlight/model.hpp"
#include "lowlight/tensor.hpp"

namespace lowlight {

/// Hyperparameters of the composite objective
/// total = rec + lambda1*(gamma*decom + (1-gamma)*sps) + lambda2*noise.
struct LossWeights {
  double lambda1 = 0.5;
  double lambda2 = 0.1;
  double gamma = 0.6;
  double beta = 10.0;
  double alpha = 1e-6;
};

struct LossBreakdown {
  double rec = 0.0, decom = 0.0, sps = 0.0, noise = 0.0, total = 0.0;
};

/// Forward differences along x and y with the last column/row zeroed.
/// Requires h, w >= 2.
std::pair<Tensor, Tensor> grad_xy(const Tensor& map);

/// Mean |y - R.L.N| over all pixels and channels (L broadcast).
double loss_rec(const Tensor& y, const DecompositionTriple& t);

/// Mean |x - R.L| over all pixels and channels.
double loss_decom(const Tensor& x, const DecompositionTriple& t);

/// Structure-weighted illumination smoothness: the mean over pixels and both
/// gradient directions of |dL| * exp(-beta * mean_c |dR^c|).
double loss_sps(const DecompositionTriple& t, double beta);

/// Mean |n - n_target|.
double loss_noise(const Tensor& n, const Tensor& n_target);

LossBreakdown total_loss(const Tensor& y, const Tensor& x,
                         const DecompositionTriple& t, const Tensor& n_target,
                         const LossWeights& w);

/// Same as total_loss but also fills d(total)/dL, d(total)/dR, d(total)/dN
/// (overwritten, shaped like the triple's components).
LossBreakdown total_loss_grad(const Tensor& y, const Tensor& x,
                              const DecompositionTriple& t,
                              const Tensor& n_target, const LossWeights& w,
                              Tensor& dL, Tensor& dR, Tensor& dN);

}  // namespace lowlight
