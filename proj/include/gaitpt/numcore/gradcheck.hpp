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

#include <functional>
#include <span>
#include <string>

#include "gaitpt/numcore/ops.hpp"

namespace gaitpt::num {

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  std::size_t coordinates = 0;
  std::string worst;  // "<input>[flat index]" of the largest error
};

/// Compares the tape gradient of scalar `f` at `x` against central
/// differences (f(x + h e) - f(x - h e)) / 2h, coordinate by coordinate.
/// Relative error is |a - n| / max(1, |a|, |n|); passes when the maximum is
/// strictly below `tol`.
GradCheckReport grad_check(const std::function<Var<double>(const Var<double>&)>& f,
                           const Tensor<double>& x, double h, double tol);

/// Same check against every tensor in `inputs` (perturbed in place) for a
/// closed-over scalar `loss`. At most `max_coords_per_input` coordinates per
/// tensor are probed, chosen by a seeded shuffle; 0 probes all of them.
GradCheckReport grad_check_inputs(const std::function<Var<double>()>& loss,
                                  std::span<const Var<double>> inputs,
                                  std::span<const std::string> names, double h, double tol,
                                  std::size_t max_coords_per_input = 0, std::uint64_t seed = 0);

}  // namespace gaitpt::num
