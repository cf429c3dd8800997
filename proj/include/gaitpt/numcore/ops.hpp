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

// Differentiable tensor operations. Each op computes its value eagerly and,
// when an input requires a gradient under an active tape, records the adjoint.
//
// Binary elementwise ops accept equal shapes or a suffix broadcast: one
// operand's shape equal to a trailing part of the other's (a bias of shape
// [C] against activations [..., C], or a rank-0 scalar).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gaitpt/numcore/autodiff.hpp"

namespace gaitpt::num {

template <typename T>
Var<T> constant(Tensor<T> value) {
  return Var<T>(std::move(value), false);
}

template <typename T>
Var<T> leaf(Tensor<T> value) {
  return Var<T>(std::move(value), true);
}

template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> scale(const Var<T>& a, T factor);
template <typename T> Var<T> add_scalar(const Var<T>& a, T offset);

/// Batched matrix product over the last two axes; leading batch axes
/// broadcast NumPy-style.
template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);

template <typename T> Var<T> permute(const Var<T>& a, const std::vector<std::size_t>& perm);
template <typename T> Var<T> transpose(const Var<T>& a, int axis0, int axis1);
template <typename T> Var<T> reshape(const Var<T>& a, Shape shape);
template <typename T> Var<T> concat(std::span<const Var<T>> parts, int axis);
template <typename T> Var<T> slice(const Var<T>& a, int axis, std::size_t start, std::size_t length);
template <typename T>
Var<T> index_select(const Var<T>& a, int axis, const std::vector<std::size_t>& indices);
/// Stacks `count` copies of `a` along a new leading axis.
template <typename T> Var<T> repeat(const Var<T>& a, std::size_t count);

/// Sum of all elements as a rank-0 tensor.
template <typename T> Var<T> sum(const Var<T>& a);
/// Sum along `axis`, removing it.
template <typename T> Var<T> sum(const Var<T>& a, int axis);
template <typename T> Var<T> mean(const Var<T>& a);
template <typename T> Var<T> mean(const Var<T>& a, int axis);

/// Max-subtracted softmax along `axis`. Throws NumericInput on non-finite input.
template <typename T> Var<T> softmax(const Var<T>& a, int axis);

/// Normalizes over the last axis, then applies gain and bias of that extent.
template <typename T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& bias, T eps = T(1e-5));

/// Exact (erf-based) GELU.
template <typename T> Var<T> gelu(const Var<T>& x);
template <typename T> Var<T> relu(const Var<T>& x);
template <typename T> Var<T> sqrt(const Var<T>& x);

/// x[..., in] * w[in, out] + b[out]; `b` may be undefined.
template <typename T> Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b);

/// x / sqrt(sum(x^2) + eps) over the last axis.
template <typename T> Var<T> l2_normalize(const Var<T>& x, T eps = T(1e-12));

/// Inverted dropout; identity when `p == 0`.
template <typename T> Var<T> dropout(const Var<T>& x, T p, std::mt19937_64& rng);

}  // namespace gaitpt::num
