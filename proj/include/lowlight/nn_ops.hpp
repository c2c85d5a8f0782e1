#pragma once

#include "lowlight/tensor.hpp"

namespace lowlight::nn {

/// Geometry of a 2-D convolution. Weights are laid out
/// [cout][cin][k][k] row-major; biases are per output channel.
struct ConvSpec {
  int cin, cout, k, stride, pad;
};

inline int conv_out_dim(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

/// y = W * x + b with the given stride/padding.
Tensor conv_forward(const Tensor& x, const ConvSpec& s, const double* w,
                    const double* b);

/// Gradient of a conv with respect to its input: scatters dy back through the
/// kernel onto an (hin, win) map. Also the forward pass of the transposed
/// convolution whose adjoint is `s`.
Tensor conv_backward_input(const Tensor& dy, const ConvSpec& s, const double* w,
                           int hin, int win);

/// Accumulates dW and db (both pre-zeroed or carrying previous items' sums).
void conv_backward_params(const Tensor& x, const Tensor& dy, const ConvSpec& s,
                          double* dw, double* db);

/// Transposed convolution doubling spatial size (stride 2, pad 1, output pad
/// 1). The weight is stored in the adjoint (downsampling) orientation: `adj`
/// maps the high-resolution side to the low-resolution side, so the deconv
/// input has adj.cout channels and its output has adj.cin channels. The bias
/// has adj.cin entries.
Tensor deconv_forward(const Tensor& x_low, const ConvSpec& adj, const double* w,
                      const double* b);
Tensor deconv_backward_input(const Tensor& dy_high, const ConvSpec& adj,
                             const double* w);
void deconv_backward_params(const Tensor& dy_high, const Tensor& x_low,
                            const ConvSpec& adj, double* dw, double* db);

void relu_(Tensor& t);
Tensor sigmoid(const Tensor& t);
Tensor tanh_map(const Tensor& t);

/// dx for z = relu(z_pre) given the post-activation y and upstream dy.
Tensor relu_backward(const Tensor& y, const Tensor& dy);
/// dz for y = sigmoid(z) given y and dy.
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);
/// dz for y = tanh(z) given y and dy.
Tensor tanh_backward(const Tensor& y, const Tensor& dy);

/// Channel concatenation [a; b].
Tensor concat(const Tensor& a, const Tensor& b);

}  // namespace lowlight::nn
