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

#include <cstdint>
#include <string>
#include <vector>

#include "gaitpt/model/config.hpp"
#include "gaitpt/numcore/gradcheck.hpp"

namespace gaitpt::model {

struct GradSuiteEntry {
  std::string name;
  num::GradCheckReport report;
};

/// Finite-difference checks of every differentiable op in 64-bit.
std::vector<GradSuiteEntry> op_grad_suite(double tol, std::uint64_t seed = 17);

/// Triplet-loss gradient of a full model built from `config`, probing up to
/// `coords_per_tensor` coordinates of every parameter and input window.
GradSuiteEntry model_grad_check(const GaitPTConfig& config, double tol, std::uint64_t seed = 99,
                                std::size_t coords_per_tensor = 8);

}  // namespace gaitpt::model
