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

#include "gaitpt/training/config.hpp"

#include "gaitpt/error.hpp"

namespace gaitpt::training {

std::string_view to_string(Distance) noexcept { return "euclidean"; }

std::optional<Distance> parse_distance(std::string_view s) noexcept {
  if (s == "euclidean") return Distance::Euclidean;
  return std::nullopt;
}

std::string_view to_string(ScheduleUnit u) noexcept {
  return u == ScheduleUnit::Epoch ? "epoch" : "iteration";
}

std::optional<ScheduleUnit> parse_schedule_unit(std::string_view s) noexcept {
  if (s == "epoch") return ScheduleUnit::Epoch;
  if (s == "iteration") return ScheduleUnit::Iteration;
  return std::nullopt;
}

void TrainConfig::validate() const {
  check(margin > 0.0, ErrorKind::Config, "margin must be positive");
  check(lr_min > 0.0 && lr_min < lr_max, ErrorKind::Config, "need 0 < lr_min < lr_max");
  check(gamma > 0.0 && gamma <= 1.0, ErrorKind::Config, "gamma must lie in (0, 1]");
  check(step_size >= 1, ErrorKind::Config, "step_size must be at least 1");
  check(identities_per_batch >= 2, ErrorKind::Config, "P must be at least 2");
  check(samples_per_identity >= 2, ErrorKind::Config, "K must be at least 2");
  check(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, ErrorKind::Config,
        "betas must lie in [0, 1)");
  check(eps > 0.0, ErrorKind::Config, "eps must be positive");
  check(weight_decay >= 0.0, ErrorKind::Config, "weight_decay must be non-negative");
  check(epochs >= 1, ErrorKind::Config, "epochs must be at least 1");
}

}  // namespace gaitpt::training
