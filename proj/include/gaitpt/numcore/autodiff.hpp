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
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <vector>

#include "gaitpt/numcore/tensor.hpp"

namespace gaitpt::num {

template <typename T>
struct Node {
  Tensor<T> value;
  std::optional<Tensor<T>> grad;
  bool requires_grad = false;
};

/// Shared handle to a tensor that may participate in reverse-mode
/// differentiation. Copies alias the same node.
template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(Tensor<T> value, bool requires_grad = false)
      : node_(std::make_shared<Node<T>>(Node<T>{std::move(value), std::nullopt, requires_grad})) {}

  bool defined() const noexcept { return node_ != nullptr; }
  const Tensor<T>& value() const { return node_->value; }
  /// Mutable access for optimizers and checkpoint loading; never call while a
  /// tape holds a reference to this node.
  Tensor<T>& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t size() const { return node_->value.size(); }

  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const noexcept { return node_ && node_->grad.has_value(); }
  const Tensor<T>& grad() const;
  void zero_grad() { node_->grad.reset(); }

  const std::shared_ptr<Node<T>>& handle() const noexcept { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Returns the node's gradient buffer, allocating zeros on first use.
template <typename T>
Tensor<T>& grad_buffer(Node<T>& node) {
  if (!node.grad) node.grad.emplace(node.value.shape(), T(0));
  return *node.grad;
}

/// Ordered record of the differentiable operations executed while it was
/// active. Creation order is a topological order, so replaying entries back to
/// front visits every node after all of its consumers.
template <typename T>
class Tape {
 public:
  using Backward = std::function<void(const Tensor<T>& grad_out)>;

  void record(std::shared_ptr<Node<T>> out, std::vector<std::shared_ptr<Node<T>>> inputs,
              Backward fn);
  std::size_t size() const noexcept { return entries_.size(); }
  void clear() noexcept { entries_.clear(); }

  /// Seeds d(loss)/d(loss) = 1 and replays adjoints. The tape is cleared
  /// afterwards; every requires_grad input it touched ends with a gradient.
  void backward(const Var<T>& loss);

 private:
  struct Entry {
    std::shared_ptr<Node<T>> out;
    std::vector<std::shared_ptr<Node<T>>> inputs;
    Backward fn;
  };
  std::vector<Entry> entries_;
};

/// Tape currently receiving operations on this thread, or nullptr.
template <typename T>
Tape<T>* active_tape() noexcept;

/// Makes `tape` the active tape of the calling thread for the scope's
/// lifetime. Scopes nest.
template <typename T>
class TapeScope {
 public:
  explicit TapeScope(Tape<T>& tape);
  /// Suspends recording for the lifetime of the scope.
  explicit TapeScope(std::nullptr_t);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape<T>* previous_;
};

/// Backpropagates `loss` through the active tape.
template <typename T>
void backward(const Var<T>& loss);

/// The active tape when any of `inputs` requires a gradient, else nullptr.
template <typename T>
Tape<T>* recording_tape(std::initializer_list<const Var<T>*> inputs) noexcept {
  Tape<T>* tape = active_tape<T>();
  if (!tape) return nullptr;
  for (const Var<T>* v : inputs) {
    if (v && v->requires_grad()) return tape;
  }
  return nullptr;
}

extern template class Var<float>;
extern template class Var<double>;
extern template class Tape<float>;
extern template class Tape<double>;
extern template class TapeScope<float>;
extern template class TapeScope<double>;

}  // namespace gaitpt::num
