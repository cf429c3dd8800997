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
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gaitpt/model/config.hpp"
#include "gaitpt/numcore/attention.hpp"
#include "gaitpt/numcore/parameter.hpp"
#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::model {

template <typename T>
struct EncoderBlock {
  num::Var<T> ln1_gain, ln1_bias;
  num::AttentionWeights<T> attn;
  num::Var<T> ln2_gain, ln2_bias;
  num::Var<T> ff1_w, ff1_b, ff2_w, ff2_b;
};

/// Class token, optional positional table [tokens + 1, C] and pre-norm blocks.
template <typename T>
struct Encoder {
  std::size_t dim = 0;
  std::size_t heads = 1;
  num::Var<T> cls;  // [C]
  num::Var<T> pos;  // undefined when positional embeddings are off
  std::vector<EncoderBlock<T>> blocks;
};

template <typename T>
Encoder<T> make_encoder(num::ParameterStore<T>& store, const std::string& prefix, std::size_t dim,
                        std::size_t blocks, std::size_t heads, std::size_t ff_mult,
                        std::size_t tokens, bool positional, std::mt19937_64& rng);

struct EncoderRun {
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
};

/// Runs `enc` over x [N, L, C]; returns [N, L + 1, C] with the class output at
/// position 0.
template <typename T>
num::Var<T> encode(const Encoder<T>& enc, const num::Var<T>& x, const EncoderRun& run = {});

/// Concatenates each group's member tokens in plan order and projects them
/// with that group's weights. feat is [..., t_in, C_in]; weights[g] is
/// [|g| * C_in, C_out] and biases[g] is [C_out].
template <typename T>
num::Var<T> joint_merge(const num::Var<T>& feat, const skeleton::MergePlan& plan,
                        std::span<const num::Var<T>> weights, std::span<const num::Var<T>> biases,
                        bool allow_overlap = false);

template <typename T>
struct StageOutput {
  num::Var<T> feat;  // same shape as the input features
  num::Var<T> cls;   // [C], or [B, C] for batched input
};

template <typename T>
struct MergeLayer {
  skeleton::MergePlan plan;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<num::Var<T>> weights;
  std::vector<num::Var<T>> biases;
};

template <typename T>
struct StageModules {
  std::optional<MergeLayer<T>> merge;  // reaches this stage's granularity
  std::optional<Encoder<T>> spatial;
  std::optional<Encoder<T>> temporal;
};

/// Per-stage shape record produced by a forward pass.
struct ForwardTrace {
  struct Entry {
    int stage = 0;
    std::size_t tokens = 0;
    std::size_t dim = 0;
  };
  std::vector<Entry> stages;
  /// Stage index and width of every class vector, in concatenation order.
  std::vector<std::pair<int, std::size_t>> class_vectors;
};

template <typename T>
class GaitPTModel {
 public:
  GaitPTModel(GaitPTConfig config, std::uint64_t seed);

  const GaitPTConfig& config() const noexcept { return config_; }
  num::ParameterStore<T>& parameters() noexcept { return store_; }
  const num::ParameterStore<T>& parameters() const noexcept { return store_; }
  std::size_t param_count() const noexcept { return store_.scalar_count(); }
  const StageModules<T>& stage(int index) const { return stages_.at(static_cast<std::size_t>(index - 1)); }

  /// Features are [n, t, C] or [B, n, t, C].
  StageOutput<T> spatial_attention_stage(const num::Var<T>& feat, int stage) const;
  StageOutput<T> temporal_attention_stage(const num::Var<T>& feat, int stage) const;

  /// One window [n, 18, 2] -> embedding [output_dim].
  num::Var<T> forward(const num::Var<T>& window, ForwardTrace* trace = nullptr) const;
  /// Batch [B, n, 18, 2] -> embeddings [B, output_dim].
  num::Var<T> forward_batch(const num::Var<T>& batch, ForwardTrace* trace = nullptr,
                            std::mt19937_64* dropout_rng = nullptr) const;

 private:
  GaitPTConfig config_;
  num::ParameterStore<T> store_;
  num::Var<T> in_w_, in_b_;
  std::vector<StageModules<T>> stages_;
  num::Var<T> head_w_, head_b_;
};

/// Stacks equal-length windows into [B, n, 18, 2].
template <typename T>
num::Tensor<T> stack_windows(std::span<const skeleton::GaitSequence> windows);

/// Embeds windows in chunks of `batch` without recording gradients.
template <typename T>
std::vector<std::vector<double>> embed_windows(const GaitPTModel<T>& model,
                                               std::span<const skeleton::GaitSequence> windows,
                                               std::size_t batch = 32);

}  // namespace gaitpt::model
