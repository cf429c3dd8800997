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

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaitpt/evaluation/metrics.hpp"
#include "gaitpt/model/gaitpt.hpp"
#include "gaitpt/skeleton/dataset.hpp"
#include "gaitpt/training/config.hpp"

namespace gaitpt::evaluation {

/// Embeds the first `model.config().sequence_length` frames of each sequence.
template <typename T>
EmbeddingSet embed_sequences(const model::GaitPTModel<T>& model,
                             std::span<const skeleton::GaitSequence> seqs);

/// Rank-1 accuracy of the probe split against the gallery split.
template <typename T>
double retrieval_rank1(const model::GaitPTModel<T>& model, const skeleton::SplitDataset& data);

/// Decorrelated per-run seed (splitmix64 of master + index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

struct AblationSettings {
  model::GaitPTConfig model;
  training::TrainConfig train;
  std::vector<std::set<int>> subsets;
  std::size_t runs = 5;
  std::uint64_t seed = 0;
};

struct AblationRow {
  std::set<int> stages;
  std::vector<double> accuracies;  // one per run
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one run
};

struct AblationPair {
  std::size_t first = 0;   // row indices
  std::size_t second = 0;
  std::optional<double> t;
  std::optional<double> p;  // empty when both samples have zero variance
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::vector<AblationPair> pairs;
};

/// Trains and scores with_stages(model, subset) `runs` times per subset.
/// Run r uses derive_seed(seed, r) for both initialization and training, so
/// subsets are compared on paired seeds.
AblationReport ablation_run(const skeleton::SplitDataset& data, const AblationSettings& settings,
                            const std::function<void(const std::string&)>& progress = {});

std::string stages_label(const std::set<int>& stages);
std::string to_json(const AblationReport& report);
std::string render_table(const AblationReport& report);

}  // namespace gaitpt::evaluation
