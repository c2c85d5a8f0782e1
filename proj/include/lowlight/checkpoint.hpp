#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowlight/config.hpp"
#include "lowlight/model.hpp"

namespace lowlight {

/// Adaptive-moment optimizer state: first/second moment per parameter array
/// plus the bias-correction step counter.
struct AdamState {
  std::vector<std::vector<double>> m, v;
  std::int64_t t = 0;

  static AdamState init(const ModelParams& params);
};

/// Core bias-corrected adaptive-moment update on one contiguous span;
/// t is the already-incremented step count.
void adam_step_span(double* p, double* m, double* v, const double* g,
                    std::size_t n, std::int64_t t, double lr, double beta1,
                    double beta2, double eps);

/// Applies one bias-corrected adaptive-moment update with step size lr.
void adam_update(ModelParams& params, AdamState& state, const ParamGrads& grads,
                 double lr, double beta1, double beta2, double eps);

/// Full training state: model, optimizer, position in the schedule, the
/// resolved configuration, and a digest of the loss log so far.
struct Checkpoint {
  ModelParams params;
  AdamState opt;
  int epoch = 0;
  std::int64_t step = 0;
  TrainConfig config;
  std::string loss_digest;
};

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

/// Self-describing binary container of named little-endian float64 arrays.
/// Layout: magic "LLCKPT01", u32 format version, u32 width, u64 model seed,
/// u32 epoch, u64 step, u64 adam step, config text (u32 length + bytes),
/// digest (u32 length + bytes), u32 array count, then per array: name (u32
/// length + bytes), u8 ndim, u32 dims[ndim], u64 element count, raw float64
/// payload.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

/// Validates magic, version and array shapes against the architecture
/// declared by the stored width. If expected_width is nonzero it must match
/// the stored width.
Checkpoint load_checkpoint(const std::string& path, int expected_width = 0);

}  // namespace lowlight
