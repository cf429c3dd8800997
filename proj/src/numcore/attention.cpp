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

#include "gaitpt/numcore/attention.hpp"

#include <cmath>

#include "gaitpt/error.hpp"

namespace gaitpt::num {

template <typename T>
Var<T> multi_head_attention(const Var<T>& tokens, const AttentionWeights<T>& w,
                            std::size_t heads, Var<T>* probs) {
  const Shape& s = tokens.shape();
  if (s.size() != 3) {
    fail(ErrorKind::Dimension, "attention expects tokens [b, t, C], got " + shape_str(s));
  }
  const std::size_t b = s[0], t = s[1], c = s[2];
  if (heads == 0 || c % heads != 0) {
    fail(ErrorKind::Config, "embedding width " + std::to_string(c) +
                                " is not divisible by head count " + std::to_string(heads));
  }
  for (const Var<T>* m : {&w.wq, &w.wk, &w.wv, &w.wo}) {
    if (m->shape() != Shape{c, c}) {
      fail(ErrorKind::Config, "attention projection shaped " + shape_str(m->shape()) +
                                  ", expected " + shape_str({c, c}));
    }
  }
  const std::size_t d = c / heads;

  auto split_heads = [&](const Var<T>& x) {
    return permute(reshape(x, {b, t, heads, d}), {0, 2, 1, 3});  // [b, h, t, d]
  };
  const Var<T> q = split_heads(linear(tokens, w.wq, w.bq));
  const Var<T> k = permute(reshape(linear(tokens, w.wk, w.bk), {b, t, heads, d}), {0, 2, 3, 1});
  const Var<T> v = split_heads(linear(tokens, w.wv, w.bv));

  const Var<T> scores = scale(matmul(q, k), T(1) / std::sqrt(static_cast<T>(d)));
  const Var<T> attn = softmax(scores, -1);
  if (probs) *probs = attn;
  const Var<T> mixed = matmul(attn, v);  // [b, h, t, d]
  const Var<T> merged = reshape(permute(mixed, {0, 2, 1, 3}), {b, t, c});
  return linear(merged, w.wo, w.bo);
}

template Var<float> multi_head_attention(const Var<float>&, const AttentionWeights<float>&,
                                         std::size_t, Var<float>*);
template Var<double> multi_head_attention(const Var<double>&, const AttentionWeights<double>&,
                                          std::size_t, Var<double>*);

}  // namespace gaitpt::num
