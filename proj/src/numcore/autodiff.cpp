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

#include "gaitpt/numcore/autodiff.hpp"

#include "gaitpt/error.hpp"

namespace gaitpt::num {

template <typename T>
const Tensor<T>& Var<T>::grad() const {
  if (!has_grad()) fail(ErrorKind::Usage, "gradient requested before backward()");
  return *node_->grad;
}

template <typename T>
void Tape<T>::record(std::shared_ptr<Node<T>> out, std::vector<std::shared_ptr<Node<T>>> inputs,
                     Backward fn) {
  entries_.push_back(Entry{std::move(out), std::move(inputs), std::move(fn)});
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss) {
  if (!loss.defined() || loss.value().size() != 1) {
    fail(ErrorKind::Usage, "backward() needs a scalar loss, got shape " +
                               (loss.defined() ? shape_str(loss.shape()) : std::string("<null>")));
  }
  if (!loss.requires_grad()) {
    fail(ErrorKind::Usage, "loss was not produced under an active tape from requires_grad inputs");
  }
  grad_buffer(*loss.handle()).fill(T(1));
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (!it->out->grad) continue;
    it->fn(*it->out->grad);
  }
  for (auto& e : entries_) {
    for (auto& in : e.inputs) {
      if (in->requires_grad) grad_buffer(*in);
    }
  }
  entries_.clear();
}

namespace {
template <typename T>
Tape<T>*& tape_slot() noexcept {
  thread_local Tape<T>* slot = nullptr;
  return slot;
}
}  // namespace

template <typename T>
Tape<T>* active_tape() noexcept {
  return tape_slot<T>();
}

template <typename T>
TapeScope<T>::TapeScope(Tape<T>& tape) : previous_(tape_slot<T>()) {
  tape_slot<T>() = &tape;
}

template <typename T>
TapeScope<T>::TapeScope(std::nullptr_t) : previous_(tape_slot<T>()) {
  tape_slot<T>() = nullptr;
}

template <typename T>
TapeScope<T>::~TapeScope() {
  tape_slot<T>() = previous_;
}

template <typename T>
void backward(const Var<T>& loss) {
  Tape<T>* tape = active_tape<T>();
  if (!tape) fail(ErrorKind::Usage, "backward() called without an active tape");
  tape->backward(loss);
}

template class Var<float>;
template class Var<double>;
template class Tape<float>;
template class Tape<double>;
template class TapeScope<float>;
template class TapeScope<double>;
template Tape<float>* active_tape<float>() noexcept;
template Tape<double>* active_tape<double>() noexcept;
template void backward<float>(const Var<float>&);
template void backward<double>(const Var<double>&);

}  // namespace gaitpt::num
