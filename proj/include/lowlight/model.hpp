#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowlight/nn_ops.hpp"
#include "lowlight/tensor.hpp"

namespace lowlight {

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<double> data;
};

/// One layer of the encoder-decoder. Deconv layers store their weight in the
/// adjoint (downsampling) orientation, see nn_ops.hpp.
struct LayerDef {
  std::string name;
  nn::ConvSpec spec;
  bool is_deconv;
};

/// The fixed layer sequence for a given base width: a full-resolution stem,
/// three stride-2 encoder stages doubling channels, three transposed-conv
/// decoder stages with skip concatenation and a fusing conv, and three 1x1
/// output heads (illumination, reflectance, noise).
std::vector<LayerDef> layer_defs(int width);

/// Named parameter arrays of the network, in fixed layer order
/// (<layer>.w then <layer>.b per layer).
class ModelParams {
 public:
  ModelParams() = default;

  int width() const { return width_; }
  std::uint64_t seed() const { return seed_; }
  std::vector<NamedArray>& arrays() { return arrays_; }
  const std::vector<NamedArray>& arrays() const { return arrays_; }

  const double* weights(int layer) const { return arrays_[2 * layer].data.data(); }
  const double* biases(int layer) const {
    return arrays_[2 * layer + 1].data.data();
  }

  friend ModelParams init_model(std::uint64_t seed, int width);
  friend ModelParams params_from_arrays(int width, std::uint64_t seed,
                                        std::vector<NamedArray> arrays);

 private:
  int width_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<NamedArray> arrays_;
};

/// Seed-deterministic initialization: uniform weights with fan-in scaled
/// bound sqrt(6/fan_in), zero biases.
ModelParams init_model(std::uint64_t seed, int width = 64);

/// Rebuilds a ModelParams from deserialized arrays, validating names and
/// shapes against the declared architecture for `width`.
ModelParams params_from_arrays(int width, std::uint64_t seed,
                               std::vector<NamedArray> arrays);

std::int64_t count_params(const ModelParams& params);

/// Network output: single-channel illumination in [0,1], three-channel
/// reflectance in [0,1], three-channel noise factor in [-1,1], all at the
/// input's spatial size.
struct DecompositionTriple {
  Tensor L, R, N;
};

/// Intermediates retained by the forward pass for backpropagation.
struct ForwardCache {
  Tensor x, a0, e1, e2, e3, c3, f3, c2, f2, c1, f1;
  Tensor L, R, N;
};

/// Forward pass on one 3-channel image whose height and width are divisible
/// by 8. Pass a cache to retain intermediates for backward_one.
DecompositionTriple forward_one(const ModelParams& params, const Tensor& y,
                                ForwardCache* cache = nullptr);

/// Batched forward; items are processed independently (optionally in
/// parallel) and never mix.
std::vector<DecompositionTriple> forward(const ModelParams& params,
                                         const std::vector<Tensor>& batch,
                                         int jobs = 1);

/// Per-array gradient accumulators aligned with ModelParams::arrays().
using ParamGrads = std::vector<std::vector<double>>;
ParamGrads zero_grads(const ModelParams& params);

/// Accumulates d(loss)/d(params) into `grads` given upstream gradients with
/// respect to the three outputs.
void backward_one(const ModelParams& params, const ForwardCache& cache,
                  const Tensor& dL, const Tensor& dR, const Tensor& dN,
                  ParamGrads& grads);

}  // namespace lowlight
