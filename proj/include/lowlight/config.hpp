#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lowlight/losses.hpp"

namespace lowlight {

/// Training protocol configuration. Serialized as flat `key = value` lines
/// with `#` comments; keys are exactly the field names below.
struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int epochs = 100;
  int batch_size = 16;
  int patch = 128;
  std::uint64_t seed = 0;
  int width = 64;
  LossWeights weights;        // keys lambda1, lambda2, gamma, beta, alpha
  double photon_scale = 255.0;
  int ckpt_every = 10;
  double clip_norm = 0.0;     // 0 disables gradient clipping
  bool cosine_decay = false;
  double val_split = 0.05;
  int jobs = 0;               // 0 = logical cores

  void validate() const;
};

/// Parses `key = value` lines (blank lines and `#` comments ignored).
std::map<std::string, std::string> parse_kv_file(const std::string& path);
std::map<std::string, std::string> parse_kv_text(const std::string& text);

/// Applies keys onto a config; unknown keys or unparsable values throw.
void apply_config_keys(TrainConfig& cfg,
                       const std::map<std::string, std::string>& kv);

TrainConfig load_train_config(const std::string& path);

/// Canonical flat text form (round-trips through parse/apply).
std::string config_to_text(const TrainConfig& cfg);

}  // namespace lowlight
