#include "lowlight/model.hpp"

#include <cmath>

#include "lowlight/parallel.hpp"
#include "lowlight/rng.hpp"

namespace lowlight {

using nn::ConvSpec;

std::vector<LayerDef> layer_defs(int width) {
  if (width < 8) throw input_error("model width must be at least 8");
  const int w = width;
  return {
      {"stem", {3, w, 3, 1, 1}, false},
      {"enc1", {w, 2 * w, 3, 2, 1}, false},
      {"enc2", {2 * w, 4 * w, 3, 2, 1}, false},
      {"enc3", {4 * w, 8 * w, 3, 2, 1}, false},
      // adjoint orientation: cin = high-res side, cout = low-res side
      {"up3", {4 * w, 8 * w, 3, 2, 1}, true},
      {"fuse3", {8 * w, 4 * w, 3, 1, 1}, false},
      {"up2", {2 * w, 4 * w, 3, 2, 1}, true},
      {"fuse2", {4 * w, 2 * w, 3, 1, 1}, false},
      {"up1", {w, 2 * w, 3, 2, 1}, true},
      {"fuse1", {2 * w, w, 3, 1, 1}, false},
      {"head_l", {w, 1, 1, 1, 0}, false},
      {"head_r", {w, 3, 1, 1, 0}, false},
      {"head_n", {w, 3, 1, 1, 0}, false},
  };
}

namespace {

// Bias length = channels the layer emits in its forward direction.
int output_channels(const LayerDef& def) {
  return def.is_deconv ? def.spec.cin : def.spec.cout;
}

// Fan-in of the layer's forward map (deconv consumes the low-res side).
int fan_in(const LayerDef& def) {
  const int in = def.is_deconv ? def.spec.cout : def.spec.cin;
  return in * def.spec.k * def.spec.k;
}

}  // namespace

ModelParams init_model(std::uint64_t seed, int width) {
  const auto defs = layer_defs(width);
  ModelParams p;
  p.width_ = width;
  p.seed_ = seed;
  for (std::size_t li = 0; li < defs.size(); ++li) {
    const auto& def = defs[li];
    Rng rng(derive_stream(seed, "init", li));
    // He-style uniform bound: keeps activation variance roughly constant
    // through the ReLU stages.
    const double bound = std::sqrt(6.0 / fan_in(def));
    NamedArray w;
    w.name = def.name + ".w";
    w.shape = {def.spec.cout, def.spec.cin, def.spec.k, def.spec.k};
    w.data.resize(static_cast<std::size_t>(def.spec.cout) * def.spec.cin *
                  def.spec.k * def.spec.k);
    for (double& x : w.data) x = rng.uniform(-bound, bound);
    NamedArray b;
    b.name = def.name + ".b";
    b.shape = {output_channels(def)};
    b.data.assign(output_channels(def), 0.0);
    p.arrays_.push_back(std::move(w));
    p.arrays_.push_back(std::move(b));
  }
  return p;
}

ModelParams params_from_arrays(int width, std::uint64_t seed,
                               std::vector<NamedArray> arrays) {
  const auto defs = layer_defs(width);
  if (arrays.size() != 2 * defs.size())
    throw input_error("parameter array count does not match architecture");
  for (std::size_t li = 0; li < defs.size(); ++li) {
    const auto& def = defs[li];
    const auto& w = arrays[2 * li];
    const auto& b = arrays[2 * li + 1];
    const std::vector<int> want_w = {def.spec.cout, def.spec.cin, def.spec.k,
                                     def.spec.k};
    if (w.name != def.name + ".w" || w.shape != want_w)
      throw input_error("shape mismatch for array '" + w.name +
                        "' against width-" + std::to_string(width) +
                        " architecture");
    if (b.name != def.name + ".b" ||
        b.shape != std::vector<int>{output_channels(def)})
      throw input_error("shape mismatch for array '" + b.name +
                        "' against width-" + std::to_string(width) +
                        " architecture");
    const auto expect =
        static_cast<std::size_t>(def.spec.cout) * def.spec.cin * def.spec.k * def.spec.k;
    if (w.data.size() != expect ||
        b.data.size() != static_cast<std::size_t>(output_channels(def)))
      throw input_error("array payload size mismatch for layer " + def.name);
  }
  ModelParams p;
  p.width_ = width;
  p.seed_ = seed;
  p.arrays_ = std::move(arrays);
  return p;
}

std::int64_t count_params(const ModelParams& params) {
  std::int64_t n = 0;
  for (const auto& a : params.arrays()) n += static_cast<std::int64_t>(a.data.size());
  return n;
}

namespace {

enum Layer {
  kStem = 0,
  kEnc1,
  kEnc2,
  kEnc3,
  kUp3,
  kFuse3,
  kUp2,
  kFuse2,
  kUp1,
  kFuse1,
  kHeadL,
  kHeadR,
  kHeadN,
};

}  // namespace

DecompositionTriple forward_one(const ModelParams& params, const Tensor& y,
                                ForwardCache* cache) {
  if (y.c != 3) throw input_error("forward: input must have 3 channels");
  if (y.h % 8 != 0 || y.w % 8 != 0)
    throw input_error("forward: spatial size must be divisible by 8");
  const auto defs = layer_defs(params.width());
  auto conv = [&](Layer li, const Tensor& in) {
    return nn::conv_forward(in, defs[li].spec, params.weights(li),
                            params.biases(li));
  };
  auto deconv = [&](Layer li, const Tensor& in) {
    return nn::deconv_forward(in, defs[li].spec, params.weights(li),
                              params.biases(li));
  };

  Tensor a0 = conv(kStem, y);
  nn::relu_(a0);
  Tensor e1 = conv(kEnc1, a0);
  nn::relu_(e1);
  Tensor e2 = conv(kEnc2, e1);
  nn::relu_(e2);
  Tensor e3 = conv(kEnc3, e2);
  nn::relu_(e3);

  Tensor c3 = nn::concat(deconv(kUp3, e3), e2);
  Tensor f3 = conv(kFuse3, c3);
  nn::relu_(f3);
  Tensor c2 = nn::concat(deconv(kUp2, f3), e1);
  Tensor f2 = conv(kFuse2, c2);
  nn::relu_(f2);
  Tensor c1 = nn::concat(deconv(kUp1, f2), a0);
  Tensor f1 = conv(kFuse1, c1);
  nn::relu_(f1);

  DecompositionTriple out;
  out.L = nn::sigmoid(conv(kHeadL, f1));
  out.R = nn::sigmoid(conv(kHeadR, f1));
  out.N = nn::tanh_map(conv(kHeadN, f1));

  if (cache) {
    cache->x = y;
    cache->a0 = std::move(a0);
    cache->e1 = std::move(e1);
    cache->e2 = std::move(e2);
    cache->e3 = std::move(e3);
    cache->c3 = std::move(c3);
    cache->f3 = std::move(f3);
    cache->c2 = std::move(c2);
    cache->f2 = std::move(f2);
    cache->c1 = std::move(c1);
    cache->f1 = std::move(f1);
    cache->L = out.L;
    cache->R = out.R;
    cache->N = out.N;
  }
  return out;
}

std::vector<DecompositionTriple> forward(const ModelParams& params,
                                         const std::vector<Tensor>& batch,
                                         int jobs) {
  std::vector<DecompositionTriple> out(batch.size());
  parallel_for(static_cast<int>(batch.size()), jobs,
               [&](int i) { out[i] = forward_one(params, batch[i]); });
  return out;
}

ParamGrads zero_grads(const ModelParams& params) {
  ParamGrads g(params.arrays().size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i].assign(params.arrays()[i].data.size(), 0.0);
  return g;
}

namespace {

// Splits the channel-concatenated gradient [da; db] of concat(a, b).
void split2(const Tensor& d, int ca, Tensor& da, Tensor& db) {
  da = Tensor(ca, d.h, d.w);
  db = Tensor(d.c - ca, d.h, d.w);
  std::copy(d.v.begin(), d.v.begin() + da.v.size(), da.v.begin());
  std::copy(d.v.begin() + da.v.size(), d.v.end(), db.v.begin());
}

void add_(Tensor& a, const Tensor& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a.v[i] += b.v[i];
}

}  // namespace

void backward_one(const ModelParams& params, const ForwardCache& cache,
                  const Tensor& dL, const Tensor& dR, const Tensor& dN,
                  ParamGrads& grads) {
  const auto defs = layer_defs(params.width());

  auto conv_back = [&](Layer li, const Tensor& input, const Tensor& dz) {
    nn::conv_backward_params(input, dz, defs[li].spec, grads[2 * li].data(),
                             grads[2 * li + 1].data());
    return nn::conv_backward_input(dz, defs[li].spec, params.weights(li),
                                   input.h, input.w);
  };
  auto deconv_back = [&](Layer li, const Tensor& input, const Tensor& dout) {
    nn::deconv_backward_params(dout, input, defs[li].spec, grads[2 * li].data(),
                               grads[2 * li + 1].data());
    return nn::deconv_backward_input(dout, defs[li].spec, params.weights(li));
  };

  // Heads (activation backward, then 1x1 convs into the shared trunk).
  Tensor df1 = conv_back(kHeadL, cache.f1, nn::sigmoid_backward(cache.L, dL));
  add_(df1, conv_back(kHeadR, cache.f1, nn::sigmoid_backward(cache.R, dR)));
  add_(df1, conv_back(kHeadN, cache.f1, nn::tanh_backward(cache.N, dN)));

  // Decoder stage 1 (full resolution).
  Tensor dc1 = conv_back(kFuse1, cache.c1, nn::relu_backward(cache.f1, df1));
  Tensor du1, da0;
  split2(dc1, params.width(), du1, da0);
  Tensor df2 = deconv_back(kUp1, cache.f2, du1);

  // Decoder stage 2.
  Tensor dc2 = conv_back(kFuse2, cache.c2, nn::relu_backward(cache.f2, df2));
  Tensor du2, de1;
  split2(dc2, 2 * params.width(), du2, de1);
  Tensor df3 = deconv_back(kUp2, cache.f3, du2);

  // Decoder stage 3.
  Tensor dc3 = conv_back(kFuse3, cache.c3, nn::relu_backward(cache.f3, df3));
  Tensor du3, de2;
  split2(dc3, 4 * params.width(), du3, de2);
  Tensor de3 = deconv_back(kUp3, cache.e3, du3);

  // Encoder (skip gradients accumulate with the downstream path).
  add_(de2, conv_back(kEnc3, cache.e2, nn::relu_backward(cache.e3, de3)));
  add_(de1, conv_back(kEnc2, cache.e1, nn::relu_backward(cache.e2, de2)));
  add_(da0, conv_back(kEnc1, cache.a0, nn::relu_backward(cache.e1, de1)));
  conv_back(kStem, cache.x, nn::relu_backward(cache.a0, da0));
}

}  // namespace lowlight
