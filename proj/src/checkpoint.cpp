#include "lowlight/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "lowlight/binio.hpp"

namespace lowlight {

AdamState AdamState::init(const ModelParams& params) {
  AdamState s;
  s.m.resize(params.arrays().size());
  s.v.resize(params.arrays().size());
  for (std::size_t i = 0; i < params.arrays().size(); ++i) {
    s.m[i].assign(params.arrays()[i].data.size(), 0.0);
    s.v[i].assign(params.arrays()[i].data.size(), 0.0);
  }
  return s;
}

void adam_step_span(double* p, double* m, double* v, const double* g,
                    std::size_t n, std::int64_t t, double lr, double beta1,
                    double beta2, double eps) {
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

void adam_update(ModelParams& params, AdamState& state, const ParamGrads& grads,
                 double lr, double beta1, double beta2, double eps) {
  state.t += 1;
  for (std::size_t a = 0; a < params.arrays().size(); ++a) {
    auto& p = params.arrays()[a].data;
    adam_step_span(p.data(), state.m[a].data(), state.v[a].data(),
                   grads[a].data(), p.size(), state.t, lr, beta1, beta2, eps);
  }
}

namespace {

constexpr char kMagic[8] = {'L', 'L', 'C', 'K', 'P', 'T', '0', '1'};

void write_array(std::ostream& out, const NamedArray& a) {
  put_string(out, a.name);
  out.put(static_cast<char>(a.shape.size()));
  for (int d : a.shape) put_u32(out, static_cast<std::uint32_t>(d));
  put_u64(out, a.data.size());
  put_doubles(out, a.data);
}

NamedArray read_array(BinReader& r) {
  NamedArray a;
  a.name = r.str(1u << 16);
  char ndim;
  r.need(1, &ndim);
  if (ndim < 0 || ndim > 8)
    throw io_error("corrupt checkpoint (ndim): " + r.path());
  for (int i = 0; i < ndim; ++i) a.shape.push_back(static_cast<int>(r.u32()));
  const std::uint64_t count = r.u64();
  std::uint64_t expect = 1;
  for (int d : a.shape) expect *= static_cast<std::uint64_t>(d);
  if (count != expect)
    throw io_error("corrupt checkpoint (element count): " + r.path());
  a.data = r.doubles(count);
  return a;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 8);
  put_u32(out, kCheckpointFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.params.width()));
  put_u64(out, ckpt.params.seed());
  put_u32(out, static_cast<std::uint32_t>(ckpt.epoch));
  put_u64(out, static_cast<std::uint64_t>(ckpt.step));
  put_u64(out, static_cast<std::uint64_t>(ckpt.opt.t));
  put_string(out, config_to_text(ckpt.config));
  put_string(out, ckpt.loss_digest);

  const auto& arrays = ckpt.params.arrays();
  put_u32(out, static_cast<std::uint32_t>(3 * arrays.size()));
  for (const auto& a : arrays) write_array(out, a);
  for (std::size_t i = 0; i < arrays.size(); ++i)
    write_array(out, {"adam.m." + arrays[i].name, arrays[i].shape, ckpt.opt.m[i]});
  for (std::size_t i = 0; i < arrays.size(); ++i)
    write_array(out, {"adam.v." + arrays[i].name, arrays[i].shape, ckpt.opt.v[i]});
  if (!out) throw io_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path, int expected_width) {
  BinReader r(path, "checkpoint");

  char magic[8];
  r.need(8, magic);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw io_error("corrupt checkpoint (bad magic): " + path);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointFormatVersion)
    throw io_error("checkpoint format version " + std::to_string(version) +
                   " is not supported (expected " +
                   std::to_string(kCheckpointFormatVersion) + "): " + path);

  Checkpoint ckpt;
  const int width = static_cast<int>(r.u32());
  if (expected_width != 0 && width != expected_width)
    throw input_error("checkpoint width " + std::to_string(width) +
                      " does not match requested width " +
                      std::to_string(expected_width) + ": " + path);
  const std::uint64_t seed = r.u64();
  ckpt.epoch = static_cast<int>(r.u32());
  ckpt.step = static_cast<std::int64_t>(r.u64());
  const std::int64_t adam_t = static_cast<std::int64_t>(r.u64());
  const std::string config_text = r.str();
  ckpt.loss_digest = r.str();
  apply_config_keys(ckpt.config, parse_kv_text(config_text));

  const std::uint32_t n_arrays = r.u32();
  const auto defs = layer_defs(width);
  if (n_arrays != 3 * 2 * defs.size())
    throw io_error("corrupt checkpoint (array count): " + path);

  std::vector<NamedArray> params;
  for (std::size_t i = 0; i < 2 * defs.size(); ++i) params.push_back(read_array(r));
  ckpt.params = params_from_arrays(width, seed, std::move(params));

  ckpt.opt = AdamState::init(ckpt.params);
  ckpt.opt.t = adam_t;
  for (auto* moments : {&ckpt.opt.m, &ckpt.opt.v}) {
    const char* prefix = moments == &ckpt.opt.m ? "adam.m." : "adam.v.";
    for (std::size_t i = 0; i < 2 * defs.size(); ++i) {
      NamedArray a = read_array(r);
      if (a.name != prefix + ckpt.params.arrays()[i].name ||
          a.data.size() != ckpt.params.arrays()[i].data.size())
        throw io_error("corrupt checkpoint (optimizer arrays): " + path);
      (*moments)[i] = std::move(a.data);
    }
  }
  return ckpt;
}

}  // namespace lowlight
