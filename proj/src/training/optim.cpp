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

#include "gaitpt/training/optim.hpp"

#include <cmath>

#include "gaitpt/error.hpp"
#include "gaitpt/numcore/kernels.hpp"

namespace gaitpt::training {

template <typename T>
OptimizerState<T> OptimizerState<T>::zeros_like(const num::ParameterStore<T>& params) {
  OptimizerState s;
  for (const auto& p : params.all()) {
    s.m.emplace_back(p.var.shape(), T(0));
    s.v.emplace_back(p.var.shape(), T(0));
  }
  return s;
}

AdamWSettings adamw_settings(const TrainConfig& cfg) {
  return {cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay};
}

template <typename T>
void adamw_step(num::ParameterStore<T>& params, OptimizerState<T>& state, double lr,
                const AdamWSettings& s) {
  auto& all = params.all();
  if (state.m.empty() && state.v.empty() && state.step == 0) state = OptimizerState<T>::zeros_like(params);
  if (state.m.size() != all.size() || state.v.size() != all.size()) {
    fail(ErrorKind::Dimension, "optimizer state holds " + std::to_string(state.m.size()) +
                                   " moments for " + std::to_string(all.size()) + " parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const num::kernels::AdamwCoeffs<T> c{static_cast<T>(lr),
                                       static_cast<T>(s.beta1),
                                       static_cast<T>(s.beta2),
                                       static_cast<T>(s.eps),
                                       static_cast<T>(s.weight_decay),
                                       static_cast<T>(1.0 - std::pow(s.beta1, t)),
                                       static_cast<T>(1.0 - std::pow(s.beta2, t))};
  const auto& k = num::kernels::active<T>();
  std::vector<T> zeros;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& var = all[i].var;
    if (state.m[i].shape() != var.shape() || state.v[i].shape() != var.shape()) {
      fail(ErrorKind::Dimension, "moment shape mismatch for " + all[i].name);
    }
    const T* g;
    if (var.has_grad()) {
      g = var.grad().ptr();
    } else {
      zeros.assign(var.size(), T(0));
      g = zeros.data();
    }
    k.adamw(var.size(), var.mutable_value().ptr(), g, state.m[i].ptr(), state.v[i].ptr(), c);
  }
}

double cyclic_lr(std::size_t iter, const TrainConfig& cfg) {
  const double it = static_cast<double>(iter);
  const double step = static_cast<double>(cfg.step_size);
  const double cycle = std::floor(1.0 + it / (2.0 * step));
  const double x = std::abs(it / step - 2.0 * cycle + 1.0);
  const double scale = std::pow(cfg.gamma, it);
  return cfg.lr_min + (cfg.lr_max - cfg.lr_min) * std::max(0.0, 1.0 - x) * scale;
}

template struct OptimizerState<float>;
template struct OptimizerState<double>;
template void adamw_step(num::ParameterStore<float>&, OptimizerState<float>&, double,
                         const AdamWSettings&);
template void adamw_step(num::ParameterStore<double>&, OptimizerState<double>&, double,
                         const AdamWSettings&);

}  // namespace gaitpt::training
