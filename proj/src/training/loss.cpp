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

#include "gaitpt/training/loss.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gaitpt/error.hpp"
#include "gaitpt/numcore/ops.hpp"

namespace gaitpt::training {

double triplet_loss(double d_ap, double d_an, double margin, bool hinge) {
  const double raw = d_ap - d_an + margin;
  return hinge ? std::max(0.0, raw) : raw;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::Input, "embedding dims differ: " + std::to_string(a.size()) + " vs " +
                               std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double triplet_loss(std::span<const double> a, std::span<const double> p,
                    std::span<const double> n, double margin, bool hinge) {
  return triplet_loss(euclidean(a, p), euclidean(a, n), margin, hinge);
}

template <typename T>
num::Var<T> triplet_loss(const num::Var<T>& embeddings, std::span<const Triplet> triplets,
                         double margin, bool hinge, std::size_t* active) {
  if (embeddings.shape().size() != 2) {
    fail(ErrorKind::Input, "triplet loss expects embeddings [B, D], got " +
                               num::shape_str(embeddings.shape()));
  }
  if (triplets.empty()) fail(ErrorKind::Input, "no triplets");
  const std::size_t rows = embeddings.shape()[0];
  std::vector<std::size_t> ai, pi, ni;
  for (const auto& t : triplets) {
    if (t.anchor >= rows || t.positive >= rows || t.negative >= rows) {
      fail(ErrorKind::Input, "triplet index out of range for " + std::to_string(rows) + " rows");
    }
    ai.push_back(t.anchor);
    pi.push_back(t.positive);
    ni.push_back(t.negative);
  }
  auto a = num::index_select(embeddings, 0, ai);
  auto dist = [&](const std::vector<std::size_t>& idx) {
    auto d = num::sub(a, num::index_select(embeddings, 0, idx));
    return num::sqrt(num::add_scalar(num::sum(num::mul(d, d), 1), T(1e-12)));
  };
  auto raw = num::add_scalar(num::sub(dist(pi), dist(ni)), static_cast<T>(margin));
  if (active) {
    *active = 0;
    for (T v : raw.value().data()) *active += v > T(0) ? 1 : 0;
  }
  return num::mean(hinge ? num::relu(raw) : raw);
}

std::vector<Triplet> batch_hard_mine(const std::vector<std::vector<double>>& embeddings,
                                     std::span<const std::string> labels) {
  const std::size_t B = embeddings.size();
  if (labels.size() != B) {
    fail(ErrorKind::Input, std::to_string(B) + " embeddings but " + std::to_string(labels.size()) +
                               " labels");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  for (const auto& [label, c] : counts) {
    if (c < 2) fail(ErrorKind::Sampling, "label '" + label + "' has a single sample in the batch");
  }
  if (counts.size() < 2) {
    fail(ErrorKind::Sampling,
         "batch holds only label '" + (counts.empty() ? std::string() : counts.begin()->first) +
             "'; at least two labels are needed");
  }
  std::vector<double> d(B * B, 0.0);
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = i + 1; j < B; ++j) d[i * B + j] = d[j * B + i] = euclidean(embeddings[i], embeddings[j]);

  std::vector<Triplet> out;
  out.reserve(B);
  for (std::size_t a = 0; a < B; ++a) {
    std::size_t pos = B, neg = B;
    for (std::size_t j = 0; j < B; ++j) {
      if (j == a) continue;
      if (labels[j] == labels[a]) {
        if (pos == B || d[a * B + j] > d[a * B + pos]) pos = j;
      } else if (neg == B || d[a * B + j] < d[a * B + neg]) {
        neg = j;
      }
    }
    out.push_back({a, pos, neg});
  }
  return out;
}

template num::Var<float> triplet_loss(const num::Var<float>&, std::span<const Triplet>, double,
                                      bool, std::size_t*);
template num::Var<double> triplet_loss(const num::Var<double>&, std::span<const Triplet>, double,
                                       bool, std::size_t*);

}  // namespace gaitpt::training
