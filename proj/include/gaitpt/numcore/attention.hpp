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

#include "gaitpt/numcore/ops.hpp"

namespace gaitpt::num {

/// Projection weights of one self-attention layer. Every matrix is C x C and
/// applied as x * W + b.
template <typename T>
struct AttentionWeights {
  Var<T> wq, bq;
  Var<T> wk, bk;
  Var<T> wv, bv;
  Var<T> wo, bo;
};

/// Multi-head scaled dot-product self-attention over tokens [b, t, C].
///
/// Each head attends with softmax(Q K^T / sqrt(C / heads)) V; head outputs
/// are concatenated and passed through the output projection. When `probs`
/// is non-null it receives the attention weights [b, heads, t, t].
template <typename T>
Var<T> multi_head_attention(const Var<T>& tokens, const AttentionWeights<T>& w,
                            std::size_t heads, Var<T>* probs = nullptr);

}  // namespace gaitpt::num
