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

#include "gaitpt/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gaitpt/error.hpp"

namespace gaitpt::num {

GradCheckReport grad_check(const std::function<Var<double>(const Var<double>&)>& f,
                           const Tensor<double>& x, double h, double tol) {
  Var<double> input(x, true);
  const std::string name = "x";
  return grad_check_inputs([&] { return f(input); }, std::span<const Var<double>>(&input, 1),
                           std::span<const std::string>(&name, 1), h, tol);
}

GradCheckReport grad_check_inputs(const std::function<Var<double>()>& loss,
                                  std::span<const Var<double>> inputs,
                                  std::span<const std::string> names, double h, double tol,
                                  std::size_t max_coords_per_input, std::uint64_t seed) {
  if (!(h > 0.0)) fail(ErrorKind::Input, "finite-difference step must be positive");

  std::vector<Var<double>> vars(inputs.begin(), inputs.end());
  for (auto& v : vars) {
    v.set_requires_grad(true);
    v.zero_grad();
  }
  {
    Tape<double> tape;
    TapeScope<double> scope(tape);
    const Var<double> l = loss();
    tape.backward(l);
  }

  GradCheckReport report;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Var<double>& v = vars[i];
    const Tensor<double> analytic = v.has_grad() ? v.grad() : Tensor<double>(v.shape());
    std::vector<std::size_t> coords(v.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (max_coords_per_input > 0 && coords.size() > max_coords_per_input) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords_per_input);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t c : coords) {
      double& slot = v.mutable_value()[c];
      const double saved = slot;
      slot = saved + h;
      const double up = loss().value().item();
      slot = saved - h;
      const double down = loss().value().item();
      slot = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[c];
      double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
      ++report.coordinates;
      if (!(err <= report.max_rel_err)) {
        report.max_rel_err = err;
        report.worst = (i < names.size() ? names[i] : "input" + std::to_string(i)) + "[" +
                       std::to_string(c) + "]";
      }
    }
  }
  report.pass = report.max_rel_err < tol;
  return report;
}

}  // namespace gaitpt::num
