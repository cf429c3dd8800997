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

#include "gaitpt/numcore/parameter.hpp"

#include <algorithm>

#include "gaitpt/error.hpp"

namespace gaitpt::num {

template <typename T>
Var<T> ParameterStore<T>::add(std::string name, Tensor<T> init) {
  if (find(name)) fail(ErrorKind::Config, "duplicate parameter name '" + name + "'");
  Var<T> v(std::move(init), true);
  params_.push_back(Parameter<T>{std::move(name), v});
  return v;
}

template <typename T>
const Parameter<T>* ParameterStore<T>::find(const std::string& name) const {
  auto it = std::find_if(params_.begin(), params_.end(),
                         [&](const Parameter<T>& p) { return p.name == name; });
  return it == params_.end() ? nullptr : &*it;
}

template <typename T>
std::size_t ParameterStore<T>::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.var.size();
  return n;
}

template <typename T>
void ParameterStore<T>::zero_grad() {
  for (auto& p : params_) p.var.zero_grad();
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace gaitpt::num
