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

#include "gaitpt/model/gradsuite.hpp"

#include <functional>
#include <random>

#include "gaitpt/model/gaitpt.hpp"
#include "gaitpt/numcore/attention.hpp"

namespace gaitpt::model {

using num::constant;
using num::Shape;
using num::Tensor;
using num::Var;

namespace {

Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<double> t(std::move(shape));
  for (auto& x : t.data()) x = u(rng);
  return t;
}

Var<double> weighted_sum(const Var<double>& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return num::sum(num::mul(y, constant(random_tensor(y.shape(), rng))));
}

}  // namespace

std::vector<GradSuiteEntry> op_grad_suite(double tol, std::uint64_t seed) {
  using num::add;
  std::mt19937_64 rng(seed);
  struct Case {
    const char* name;
    Shape shape;
    std::function<Var<double>(const Var<double>&)> op;
  };
  const auto other = random_tensor({3, 4}, rng);
  const auto bias = random_tensor({4}, rng);
  const auto wmat = random_tensor({4, 5}, rng);
  const auto gain = random_tensor({4}, rng, 0.5, 1.5);
  const auto bmat = random_tensor({2, 4, 3}, rng);
  const auto bias5 = random_tensor({5}, rng);
  const std::vector<Case> cases{
      {"add", {3, 4}, [&](const Var<double>& x) { return add(x, constant(other)); }},
      {"add_broadcast", {4}, [&](const Var<double>& x) { return add(constant(other), x); }},
      {"sub", {3, 4}, [&](const Var<double>& x) { return num::sub(constant(other), x); }},
      {"mul", {3, 4}, [](const Var<double>& x) { return num::mul(x, x); }},
      {"scale", {3, 4}, [](const Var<double>& x) { return num::scale(x, -2.5); }},
      {"add_scalar", {3, 4}, [](const Var<double>& x) { return num::mul(num::add_scalar(x, 0.3), x); }},
      {"matmul", {3, 4}, [&](const Var<double>& x) { return num::matmul(x, constant(wmat)); }},
      {"matmul_batched", {2, 3, 4}, [&](const Var<double>& x) { return num::matmul(x, constant(bmat)); }},
      {"permute", {2, 3, 4}, [](const Var<double>& x) { return num::permute(x, {2, 0, 1}); }},
      {"transpose", {3, 4}, [](const Var<double>& x) { return num::transpose(x, 0, 1); }},
      {"reshape", {3, 4}, [](const Var<double>& x) { return num::reshape(x, {2, 6}); }},
      {"concat", {3, 4}, [&](const Var<double>& x) {
         std::vector<Var<double>> parts{x, constant(other), x};
         return num::concat<double>(parts, 1);
       }},
      {"slice", {3, 4}, [](const Var<double>& x) { return num::slice(x, 1, 1, 2); }},
      {"index_select", {3, 4}, [](const Var<double>& x) { return num::index_select(x, 0, {2, 0, 2}); }},
      {"repeat", {3, 4}, [](const Var<double>& x) { return num::repeat(x, 3); }},
      {"sum", {3, 4}, [](const Var<double>& x) { return num::sum(x); }},
      {"sum_axis", {3, 4}, [](const Var<double>& x) { return num::sum(x, 0); }},
      {"mean", {3, 4}, [](const Var<double>& x) { return num::mean(x); }},
      {"mean_axis", {2, 3, 4}, [](const Var<double>& x) { return num::mean(x, 1); }},
      {"softmax", {3, 4}, [](const Var<double>& x) { return num::softmax(x, -1); }},
      {"layer_norm", {3, 4}, [&](const Var<double>& x) { return num::layer_norm(x, constant(gain), constant(bias)); }},
      {"layer_norm_gain", {4}, [&](const Var<double>& g) { return num::layer_norm(constant(other), g, constant(bias)); }},
      {"layer_norm_bias", {4}, [&](const Var<double>& b) { return num::layer_norm(constant(other), constant(gain), b); }},
      {"gelu", {3, 4}, [](const Var<double>& x) { return num::gelu(x); }},
      {"relu", {3, 4}, [](const Var<double>& x) { return num::relu(x); }},
      {"sqrt", {3, 4}, [](const Var<double>& x) { return num::sqrt(num::add_scalar(num::mul(x, x), 0.5)); }},
      {"linear", {3, 4}, [&](const Var<double>& x) { return num::linear(x, constant(wmat), constant(bias5)); }},
      {"linear_weight", {4, 5}, [&](const Var<double>& w) { return num::linear(constant(other), w, constant(bias5)); }},
      {"l2_normalize", {3, 4}, [](const Var<double>& x) { return num::l2_normalize(x); }},
      {"dropout", {3, 4}, [](const Var<double>& x) {
         std::mt19937_64 mask(5);
         return num::dropout(x, 0.25, mask);
       }},
  };

  std::vector<GradSuiteEntry> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    auto x = random_tensor(c.shape, rng, -1.5, 1.5);
    if (std::string_view(c.name) == "relu")
      for (auto& v : x.data()) v += v > 0 ? 0.1 : -0.1;
    out.push_back({c.name, num::grad_check([&](const Var<double>& v) { return weighted_sum(c.op(v), 100 + i); },
                                           x, 1e-5, tol)});
  }

  num::AttentionWeights<double> w;
  std::vector<Var<double>> inputs;
  std::vector<std::string> names{"wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo", "x"};
  for (Var<double>* m : {&w.wq, &w.bq, &w.wk, &w.bk, &w.wv, &w.bv, &w.wo, &w.bo}) {
    const bool bias_term = m == &w.bq || m == &w.bk || m == &w.bv || m == &w.bo;
    *m = num::leaf(random_tensor(bias_term ? Shape{6} : Shape{6, 6}, rng, -0.7, 0.7));
    inputs.push_back(*m);
  }
  auto x = num::leaf(random_tensor({2, 3, 6}, rng));
  inputs.push_back(x);
  out.push_back({"multi_head_attention",
                 num::grad_check_inputs([&] { return weighted_sum(num::multi_head_attention(x, w, 3), 77); },
                                        inputs, names, 1e-5, tol)});
  return out;
}

GradSuiteEntry model_grad_check(const GaitPTConfig& config, double tol, std::uint64_t seed,
                                std::size_t coords_per_tensor) {
  GaitPTModel<double> m(config, seed);
  std::mt19937_64 rng(seed);
  const std::size_t n = config.sequence_length;
  auto a = num::leaf(random_tensor({n, 18, 2}, rng, 0.0, 1.0));
  auto p = num::leaf(random_tensor({n, 18, 2}, rng, 0.0, 1.0));
  auto q = num::leaf(random_tensor({n, 18, 2}, rng, 0.0, 1.0));
  auto dist = [](const Var<double>& x, const Var<double>& y) {
    auto d = num::sub(x, y);
    return num::sqrt(num::add_scalar(num::sum(num::mul(d, d)), 1e-12));
  };
  auto loss = [&] {
    const auto ea = m.forward(a);
    return num::add_scalar(num::sub(dist(ea, m.forward(p)), dist(ea, m.forward(q))), 0.02);
  };
  std::vector<Var<double>> inputs{a, p, q};
  std::vector<std::string> names{"anchor", "positive", "negative"};
  for (const auto& prm : m.parameters().all()) {
    inputs.push_back(prm.var);
    names.push_back(prm.name);
  }
  return {"gaitpt_model", num::grad_check_inputs(loss, inputs, names, 1e-5, tol, coords_per_tensor, seed)};
}

}  // namespace gaitpt::model
