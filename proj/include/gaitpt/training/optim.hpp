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
#include <vector>

#include "gaitpt/numcore/parameter.hpp"
#include "gaitpt/training/config.hpp"

namespace gaitpt::training {

template <typename T>
struct OptimizerState {
  std::vector<num::Tensor<T>> m;  // first moments, parameter order
  std::vector<num::Tensor<T>> v;  // second moments
  std::size_t step = 0;

  /// Zeroed moments shaped like `params`.
  static OptimizerState zeros_like(const num::ParameterStore<T>& params);
};

struct AdamWSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;
};

AdamWSettings adamw_settings(const TrainConfig& cfg);

/// One decoupled-weight-decay Adam update of every parameter in `params`.
/// Parameters without a gradient are updated with a zero gradient.
template <typename T>
void adamw_step(num::ParameterStore<T>& params, OptimizerState<T>& state, double lr,
                const AdamWSettings& s);

/// Exponential-range triangular schedule with half-cycle `step_size`.
double cyclic_lr(std::size_t iter, const TrainConfig& cfg);

}  // namespace gaitpt::training
