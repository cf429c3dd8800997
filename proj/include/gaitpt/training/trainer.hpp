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

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitpt/model/gaitpt.hpp"
#include "gaitpt/training/config.hpp"
#include "gaitpt/training/optim.hpp"

namespace gaitpt::training {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double loss = 0.0;            // mean over batches
  double active_triplets = 0.0; // fraction with nonzero hinge argument
  std::optional<double> rank1;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

/// One JSON object per epoch, fixed key order.
std::string to_json_line(const EpochLog& log);

template <typename T>
struct TrainHooks {
  /// Optional per-epoch accuracy, stored in EpochLog::rank1.
  std::function<std::optional<double>(std::size_t epoch, const model::GaitPTModel<T>&)> evaluate;
  /// Called after each epoch, e.g. to write a checkpoint or print progress.
  std::function<void(const EpochLog&, const model::GaitPTModel<T>&, const OptimizerState<T>&)>
      on_epoch;
};

/// Trains `model` in place on normalized sequences with P x K batches.
/// Sequences shorter than the model's window are skipped; fewer than P
/// identities with K usable sequences is a configuration error.
template <typename T>
std::vector<EpochLog> train(model::GaitPTModel<T>& model,
                            std::span<const skeleton::GaitSequence> sequences,
                            const TrainConfig& cfg, const TrainHooks<T>& hooks = {},
                            OptimizerState<T>* state = nullptr);

/// Mean batch-hard loss over `batches` P x K batches drawn with `seed`
/// (head windows, no parameter updates).
template <typename T>
double evaluate_loss(const model::GaitPTModel<T>& model,
                     std::span<const skeleton::GaitSequence> sequences, const TrainConfig& cfg,
                     std::size_t batches, std::uint64_t seed);

}  // namespace gaitpt::training
