#include "lowlight/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "lowlight/noise_physics.hpp"
#include "lowlight/parallel.hpp"
#include "lowlight/rng.hpp"

namespace lowlight {

namespace {

void check_finite(const LossBreakdown& b, std::int64_t step) {
  const std::pair<const char*, double> parts[] = {{"rec", b.rec},
                                                  {"decom", b.decom},
                                                  {"sps", b.sps},
                                                  {"noise", b.noise},
                                                  {"total", b.total}};
  for (const auto& [name, value] : parts)
    if (!std::isfinite(value))
      throw numeric_error("non-finite " + std::string(name) + " loss at step " +
                          std::to_string(step));
}

void accumulate(ParamGrads& acc, const ParamGrads& g) {
  for (std::size_t a = 0; a < acc.size(); ++a)
    for (std::size_t i = 0; i < acc[a].size(); ++i) acc[a][i] += g[a][i];
}

void scale(ParamGrads& g, double s) {
  for (auto& a : g)
    for (double& x : a) x *= s;
}

double global_norm(const ParamGrads& g) {
  double sq = 0.0;
  for (const auto& a : g)
    for (double x : a) sq += x * x;
  return std::sqrt(sq);
}

std::uint64_t fnv1a64_update(std::uint64_t h, const std::string& s) {
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Digest {
  std::int64_t rows = 0;
  std::uint64_t fnv = 0xcbf29ce484222325ULL;

  std::string text() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "rows=%lld;fnv64=%016llx",
                  static_cast<long long>(rows),
                  static_cast<unsigned long long>(fnv));
    return buf;
  }
  static Digest parse(const std::string& s) {
    Digest d;
    long long rows = 0;
    unsigned long long fnv = 0;
    if (std::sscanf(s.c_str(), "rows=%lld;fnv64=%llx", &rows, &fnv) == 2) {
      d.rows = rows;
      d.fnv = fnv;
    }
    return d;
  }
};

}  // namespace

std::string format_loss_row(std::int64_t step, int epoch,
                            const LossBreakdown& b) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g",
                static_cast<long long>(step), epoch, b.rec, b.decom, b.sps,
                b.noise, b.total);
  return buf;
}

LossBreakdown train_step(ModelParams& params, AdamState& opt,
                         const TrainBatch& batch, const TrainConfig& cfg,
                         std::uint64_t noise_stream, double lr) {
  const int n = static_cast<int>(batch.low.size());
  if (n == 0 || batch.high.size() != batch.low.size())
    throw input_error("train_step: empty or mismatched batch");
  const int jobs = cfg.jobs <= 0 ? default_jobs() : cfg.jobs;
  const int chunk = std::max(1, std::min(jobs, n));

  ParamGrads acc = zero_grads(params);
  std::vector<ParamGrads> slot_grads(chunk);
  std::vector<LossBreakdown> item_loss(n);
  const PhotonScale photons(cfg.photon_scale);

  for (int base = 0; base < n; base += chunk) {
    const int m = std::min(chunk, n - base);
    parallel_for(m, jobs, [&](int k) {
      const int i = base + k;
      ForwardCache cache;
      forward_one(params, batch.low[i], &cache);
      const DecompositionTriple t{cache.L, cache.R, cache.N};
      const Image nt = noise_target(batch.low[i], photons, cfg.weights.alpha,
                                    derive_stream(noise_stream, "item", i));
      Tensor dL, dR, dN;
      item_loss[i] =
          total_loss_grad(batch.low[i], batch.high[i], t, nt, cfg.weights, dL,
                          dR, dN);
      if (slot_grads[k].empty())
        slot_grads[k] = zero_grads(params);
      else
        for (auto& a : slot_grads[k]) std::fill(a.begin(), a.end(), 0.0);
      backward_one(params, cache, dL, dR, dN, slot_grads[k]);
    });
    for (int k = 0; k < m; ++k) accumulate(acc, slot_grads[k]);
  }

  scale(acc, 1.0 / n);
  LossBreakdown avg;
  for (const auto& b : item_loss) {
    avg.rec += b.rec / n;
    avg.decom += b.decom / n;
    avg.sps += b.sps / n;
    avg.noise += b.noise / n;
    avg.total += b.total / n;
  }
  check_finite(avg, opt.t + 1);

  if (cfg.clip_norm > 0.0) {
    const double norm = global_norm(acc);
    if (norm > cfg.clip_norm) scale(acc, cfg.clip_norm / norm);
  }
  adam_update(params, opt, acc, lr, cfg.beta1, cfg.beta2, cfg.eps);
  return avg;
}

namespace {

std::vector<std::size_t> holdout_indices(std::size_t n, double val_split,
                                         std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(std::floor(val_split * n));
  if (k == 0) return {};
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_stream(seed, "val", 0));
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Checkpoint train(const TrainConfig& cfg, const SampleSource& source,
                 const TrainHooks& hooks, const Checkpoint* resume) {
  cfg.validate();
  const std::size_t n = source.size();
  if (n == 0) throw input_error("train: empty dataset");

  const auto held = holdout_indices(n, cfg.val_split, cfg.seed);
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(held.begin(), held.end(), i)) train_idx.push_back(i);
  if (train_idx.empty())
    throw input_error("train: validation split leaves no training pairs");

  Checkpoint ckpt;
  Digest digest;
  if (resume) {
    if (resume->params.width() != cfg.width)
      throw input_error("train: resume checkpoint width mismatch");
    ckpt = *resume;
    ckpt.config = cfg;
    digest = Digest::parse(resume->loss_digest);
  } else {
    ckpt.params = init_model(derive_stream(cfg.seed, "init-root", 0), cfg.width);
    ckpt.opt = AdamState::init(ckpt.params);
    ckpt.config = cfg;
  }

  auto snapshot = [&](int epoch, std::int64_t step) {
    ckpt.epoch = epoch;
    ckpt.step = step;
    ckpt.loss_digest = digest.text();
    if (hooks.on_checkpoint) hooks.on_checkpoint(epoch, ckpt);
    if (hooks.on_validation && !held.empty()) {
      double val = 0.0;
      for (std::size_t vi = 0; vi < held.size(); ++vi) {
        PairedSample pair = source.get(held[vi]);
        if (pair.low.h > cfg.patch || pair.low.w > cfg.patch)
          pair = random_crop_pair(pair, cfg.patch,
                                  derive_stream(cfg.seed, "valcrop", vi));
        const auto t = forward_one(ckpt.params, pair.low);
        const Image nt =
            noise_target(pair.low, PhotonScale(cfg.photon_scale),
                         cfg.weights.alpha,
                         derive_stream(cfg.seed, "valnoise", vi));
        val += total_loss(pair.low, pair.high, t, nt, cfg.weights).total /
               static_cast<double>(held.size());
      }
      hooks.on_validation(epoch, val);
    }
  };

  if (cfg.epochs == 0 || (resume && resume->epoch >= cfg.epochs)) {
    snapshot(resume ? resume->epoch : 0, resume ? resume->step : 0);
    return ckpt;
  }

  std::int64_t step = resume ? resume->step : 0;
  const int first_epoch = resume ? resume->epoch : 0;

  for (int epoch = first_epoch; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order = train_idx;
    Rng shuffle_rng(derive_stream(cfg.seed, "shuffle", epoch));
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_int(i + 1)]);

    Rng crop_rng(derive_stream(cfg.seed, "crop", epoch));
    for (std::size_t pos = 0; pos < order.size();) {
      TrainBatch batch;
      const std::size_t end =
          std::min(order.size(), pos + static_cast<std::size_t>(cfg.batch_size));
      for (; pos < end; ++pos) {
        const std::uint64_t crop_seed = crop_rng.next_u64();
        PairedSample pair = source.get(order[pos]);
        if (pair.low.h != cfg.patch || pair.low.w != cfg.patch)
          pair = random_crop_pair(pair, cfg.patch, crop_seed);
        batch.low.push_back(std::move(pair.low));
        batch.high.push_back(std::move(pair.high));
      }
      double lr = cfg.lr;
      if (cfg.cosine_decay)
        lr *= 0.5 * (1.0 + std::cos(3.141592653589793 * epoch / cfg.epochs));
      const LossBreakdown b =
          train_step(ckpt.params, ckpt.opt, batch, cfg,
                     derive_stream(cfg.seed, "noise", step), lr);
      ++step;
      digest.rows += 1;
      digest.fnv = fnv1a64_update(digest.fnv, format_loss_row(step, epoch, b) + "\n");
      if (hooks.on_step) hooks.on_step(step, epoch, b);
    }
    if ((epoch + 1) % cfg.ckpt_every == 0 || epoch + 1 == cfg.epochs)
      snapshot(epoch + 1, step);
  }
  ckpt.epoch = cfg.epochs;
  ckpt.step = step;
  ckpt.loss_digest = digest.text();
  return ckpt;
}

}  // namespace lowlight
