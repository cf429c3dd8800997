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
#include <cstdint>
#include <optional>
#include <string_view>

namespace gaitpt::training {

enum class Distance { Euclidean };

/// Unit in which the learning-rate scheduler advances.
enum class ScheduleUnit { Epoch, Iteration };

std::string_view to_string(Distance d) noexcept;
std::optional<Distance> parse_distance(std::string_view s) noexcept;
std::string_view to_string(ScheduleUnit u) noexcept;
std::optional<ScheduleUnit> parse_schedule_unit(std::string_view s) noexcept;

struct TrainConfig {
  double margin = 0.02;
  Distance distance = Distance::Euclidean;
  bool hinge = true;
  std::size_t identities_per_batch = 8;  // P
  std::size_t samples_per_identity = 4;  // K
  double lr_min = 1e-4;
  double lr_max = 1e-2;
  double gamma = 0.995;
  std::size_t step_size = 15;
  ScheduleUnit schedule_unit = ScheduleUnit::Epoch;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t epochs = 30;
  std::size_t batches_per_epoch = 0;  // 0: max(1, train sequences / (P * K))
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace gaitpt::training
