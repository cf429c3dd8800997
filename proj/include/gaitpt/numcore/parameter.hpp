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

#include <string>
#include <vector>

#include "gaitpt/numcore/autodiff.hpp"

namespace gaitpt::num {

template <typename T>
struct Parameter {
  std::string name;  // dotted path, e.g. "stage1.spatial.block0.attn.wq"
  Var<T> var;
};

/// Ordered, uniquely named collection of trainable tensors.
template <typename T>
class ParameterStore {
 public:
  /// Registers a new requires_grad leaf; duplicate names are rejected.
  Var<T> add(std::string name, Tensor<T> init);

  const std::vector<Parameter<T>>& all() const noexcept { return params_; }
  std::vector<Parameter<T>>& all() noexcept { return params_; }
  const Parameter<T>* find(const std::string& name) const;
  std::size_t scalar_count() const noexcept;
  void zero_grad();

 private:
  std::vector<Parameter<T>> params_;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;

}  // namespace gaitpt::num
