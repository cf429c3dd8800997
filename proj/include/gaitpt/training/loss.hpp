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
#include <span>
#include <string>
#include <vector>

#include "gaitpt/numcore/autodiff.hpp"

namespace gaitpt::training {

struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// max(0, d_ap - d_an + margin), or the raw difference when `hinge` is off.
double triplet_loss(double d_ap, double d_an, double margin, bool hinge = true);

/// Euclidean triplet loss on explicit embeddings; dimension mismatch is an
/// input error.
double triplet_loss(std::span<const double> a, std::span<const double> p,
                    std::span<const double> n, double margin, bool hinge = true);

double euclidean(std::span<const double> a, std::span<const double> b);

/// Mean triplet loss over rows of `embeddings` [B, D]. Distances use
/// sqrt(|x - y|^2 + 1e-12) so the gradient stays finite at zero distance.
/// `active` receives the number of triplets with a positive hinge argument.
template <typename T>
num::Var<T> triplet_loss(const num::Var<T>& embeddings, std::span<const Triplet> triplets,
                         double margin, bool hinge = true, std::size_t* active = nullptr);

/// Batch-hard mining: for every anchor, the farthest same-label sample and
/// the nearest other-label sample, ties to the lowest index. Every label
/// needs at least two samples and at least two labels must be present.
std::vector<Triplet> batch_hard_mine(const std::vector<std::vector<double>>& embeddings,
                                     std::span<const std::string> labels);

}  // namespace gaitpt::training
