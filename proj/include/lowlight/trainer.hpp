#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lowlight/checkpoint.hpp"
#include "lowlight/config.hpp"
#include "lowlight/dataset.hpp"

namespace lowlight {

/// Where training pairs come from. Implementations must return identical data
/// for identical indices across calls (the loop may fetch a pair many times).
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual const std::string& id(std::size_t i) const = 0;
  virtual PairedSample get(std::size_t i) const = 0;
};

/// In-memory pairs (tests, synthetic data).
class MemorySource : public SampleSource {
 public:
  explicit MemorySource(std::vector<PairedSample> pairs)
      : pairs_(std::move(pairs)) {}
  std::size_t size() const override { return pairs_.size(); }
  const std::string& id(std::size_t i) const override { return pairs_[i].id; }
  PairedSample get(std::size_t i) const override { return pairs_[i]; }

 private:
  std::vector<PairedSample> pairs_;
};

/// Loads pairs from disk on demand.
class DirSource : public SampleSource {
 public:
  explicit DirSource(std::vector<PairRef> refs) : refs_(std::move(refs)) {}
  std::size_t size() const override { return refs_.size(); }
  const std::string& id(std::size_t i) const override { return refs_[i].id; }
  PairedSample get(std::size_t i) const override { return load_pair(refs_[i]); }

 private:
  std::vector<PairRef> refs_;
};

struct TrainBatch {
  std::vector<Tensor> low, high;
};

/// One optimizer step over a batch: forward, composite loss against a fresh
/// per-item noise target, backprop, adaptive-moment update. Throws
/// numeric_error naming the first non-finite constituent.
LossBreakdown train_step(ModelParams& params, AdamState& opt,
                         const TrainBatch& batch, const TrainConfig& cfg,
                         std::uint64_t noise_stream, double lr);

struct TrainHooks {
  std::function<void(std::int64_t step, int epoch, const LossBreakdown&)> on_step;
  std::function<void(int epoch, const Checkpoint&)> on_checkpoint;
  std::function<void(int epoch, double val_total)> on_validation;
};

/// Canonical loss-log row (shared by the CSV writer and the digest):
/// "step,epoch,rec,decom,sps,noise,total" with 17-significant-digit reals.
std::string format_loss_row(std::int64_t step, int epoch, const LossBreakdown&);

/// Runs the paired-patch training protocol: a seeded validation holdout,
/// per-epoch reshuffle, on-the-fly random crops, one checkpoint every
/// cfg.ckpt_every epochs plus one at the end. All randomness derives from
/// cfg.seed, so a resumed run replays exactly like an uninterrupted one.
Checkpoint train(const TrainConfig& cfg, const SampleSource& source,
                 const TrainHooks& hooks = {},
                 const Checkpoint* resume = nullptr);

}  // namespace lowlight
