// Copyright 2026 The GaitPT Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaitpt/training/trainer.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <json.hpp>

#include "gaitpt/error.hpp"
#include "gaitpt/skeleton/preprocess.hpp"
#include "gaitpt/training/loss.hpp"

namespace gaitpt::training {

std::string to_json_line(const EpochLog& log) {
  nlohmann::ordered_json j;
  j["epoch"] = log.epoch;
  j["lr"] = log.lr;
  j["loss"] = log.loss;
  j["active_triplets"] = log.active_triplets;
  if (log.rank1) j["rank1"] = *log.rank1;
  return j.dump();
}

namespace {

using skeleton::GaitSequence;

struct Pool {
  std::vector<std::string> ids;                      // eligible identities, sorted
  std::map<std::string, std::vector<std::size_t>> members;
  std::size_t usable = 0;
};

Pool make_pool(std::span<const GaitSequence> seqs, std::size_t window, const TrainConfig& cfg) {
  Pool pool;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].length() < window) continue;
    pool.members[seqs[i].subject_id].push_back(i);
    ++pool.usable;
  }
  for (const auto& [id, idx] : pool.members)
    if (idx.size() >= cfg.samples_per_identity) pool.ids.push_back(id);
  if (pool.ids.size() < cfg.identities_per_batch) {
    fail(ErrorKind::Config,
         "dataset too small for P x K batches: " + std::to_string(pool.ids.size()) +
             " identities have at least K=" + std::to_string(cfg.samples_per_identity) +
             " sequences of " + std::to_string(window) + " frames, P=" +
             std::to_string(cfg.identities_per_batch));
  }
  return pool;
}

struct Batch {
  std::vector<GaitSequence> windows;
  std::vector<std::string> labels;
};

Batch draw_batch(const Pool& pool, std::span<const GaitSequence> seqs, std::size_t window,
                 const TrainConfig& cfg, skeleton::WindowMode mode, std::mt19937_64& rng) {
  std::vector<std::string> ids = pool.ids;
  std::shuffle(ids.begin(), ids.end(), rng);
  Batch b;
  for (std::size_t p = 0; p < cfg.identities_per_batch; ++p) {
    std::vector<std::size_t> idx = pool.members.at(ids[p]);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < cfg.samples_per_identity; ++k) {
      b.windows.push_back(skeleton::sample_window(seqs[idx[k]], window, mode, &rng));
      b.labels.push_back(ids[p]);
    }
  }
  return b;
}

template <typename T>
std::vector<std::vector<double>> rows(const num::Tensor<T>& e) {
  const std::size_t B = e.shape()[0], D = e.shape()[1];
  std::vector<std::vector<double>> out(B);
  for (std::size_t i = 0; i < B; ++i) out[i].assign(e.ptr() + i * D, e.ptr() + (i + 1) * D);
  return out;
}

}  // namespace

template <typename T>
std::vector<EpochLog> train(model::GaitPTModel<T>& model, std::span<const GaitSequence> sequences,
                            const TrainConfig& cfg, const TrainHooks<T>& hooks,
                            OptimizerState<T>* state) {
  cfg.validate();
  const std::size_t window = model.config().sequence_length;
  const Pool pool = make_pool(sequences, window, cfg);
  const std::size_t per_batch = cfg.identities_per_batch * cfg.samples_per_identity;
  const std::size_t batches =
      cfg.batches_per_epoch ? cfg.batches_per_epoch : std::max<std::size_t>(1, pool.usable / per_batch);

  OptimizerState<T> local;
  OptimizerState<T>& opt = state ? *state : local;
  if (opt.m.empty()) opt = OptimizerState<T>::zeros_like(model.parameters());
  const AdamWSettings settings = adamw_settings(cfg);

  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<EpochLog> logs;
  std::size_t iter = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0, lr = 0.0;
    std::size_t active_sum = 0, triplet_sum = 0;
    for (std::size_t b = 0; b < batches; ++b, ++iter) {
      lr = cyclic_lr(cfg.schedule_unit == ScheduleUnit::Epoch ? epoch : iter, cfg);
      Batch batch = draw_batch(pool, sequences, window, cfg, skeleton::WindowMode::TrainRandom, rng);
      num::Tape<T> tape;
      {
        num::TapeScope<T> scope(tape);
        auto emb = model.forward_batch(num::constant(model::stack_windows<T>(batch.windows)),
                                       nullptr, &dropout_rng);
        const auto triplets = batch_hard_mine(rows(emb.value()), batch.labels);
        std::size_t active = 0;
        auto loss = triplet_loss(emb, triplets, cfg.margin, cfg.hinge, &active);
        loss_sum += static_cast<double>(loss.value().item());
        active_sum += active;
        triplet_sum += triplets.size();
        model.parameters().zero_grad();
        if (loss.requires_grad()) tape.backward(loss);
      }
      adamw_step(model.parameters(), opt, lr, settings);
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.lr = lr;
    log.loss = loss_sum / static_cast<double>(batches);
    log.active_triplets = static_cast<double>(active_sum) / static_cast<double>(triplet_sum);
    if (hooks.evaluate) log.rank1 = hooks.evaluate(log.epoch, model);
    logs.push_back(log);
    if (hooks.on_epoch) hooks.on_epoch(log, model, opt);
  }
  model.parameters().zero_grad();
  return logs;
}

template <typename T>
double evaluate_loss(const model::GaitPTModel<T>& model, std::span<const GaitSequence> sequences,
                     const TrainConfig& cfg, std::size_t batches, std::uint64_t seed) {
  cfg.validate();
  const std::size_t window = model.config().sequence_length;
  const Pool pool = make_pool(sequences, window, cfg);
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (std::size_t b = 0; b < std::max<std::size_t>(1, batches); ++b) {
    Batch batch = draw_batch(pool, sequences, window, cfg, skeleton::WindowMode::EvalHead, rng);
    auto emb = model::embed_windows(model, std::span<const GaitSequence>(batch.windows),
                                    batch.windows.size());
    const auto triplets = batch_hard_mine(emb, batch.labels);
    double sum = 0.0;
    for (const auto& t : triplets)
      sum += triplet_loss(emb[t.anchor], emb[t.positive], emb[t.negative], cfg.margin, cfg.hinge);
    total += sum / static_cast<double>(triplets.size());
  }
  return total / static_cast<double>(std::max<std::size_t>(1, batches));
}

#define GAITPT_INSTANTIATE_TRAIN(T)                                                           \
  template std::vector<EpochLog> train(model::GaitPTModel<T>&, std::span<const GaitSequence>, \
                                       const TrainConfig&, const TrainHooks<T>&,              \
                                       OptimizerState<T>*);                                   \
  template double evaluate_loss(const model::GaitPTModel<T>&, std::span<const GaitSequence>,  \
                                const TrainConfig&, std::size_t, std::uint64_t);

GAITPT_INSTANTIATE_TRAIN(float)
GAITPT_INSTANTIATE_TRAIN(double)

#undef GAITPT_INSTANTIATE_TRAIN

}  // namespace gaitpt::training
