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

#include <array>
#include <cstddef>
#include <set>
#include <vector>

#include "gaitpt/skeleton/anatomy.hpp"

namespace gaitpt::model {

struct StageConfig {
  int index = 1;            // 1..4
  std::size_t dim = 32;     // embedding width C
  std::size_t blocks = 3;   // encoder blocks per encoder
  std::size_t heads = 4;
  bool has_spatial = true;  // false for stage 4
  bool active = true;

  friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

struct GaitPTConfig {
  std::array<StageConfig, 4> stages{{
      {1, 32, 3, 4, true, true},
      {2, 64, 3, 4, true, true},
      {3, 128, 3, 4, true, true},
      {4, 256, 3, 4, false, true},
  }};
  skeleton::PartitionScheme scheme = skeleton::PartitionScheme::HUL;
  std::size_t sequence_length = 30;
  std::size_t output_dim = 256;
  std::size_t ff_mult = 4;
  bool spatial_pos = true;
  bool temporal_pos = true;
  double dropout = 0.0;

  const StageConfig& stage(int index) const { return stages.at(static_cast<std::size_t>(index - 1)); }
  StageConfig& stage(int index) { return stages.at(static_cast<std::size_t>(index - 1)); }
  std::vector<int> active_stages() const;

  /// Throws a configuration error naming the first violated constraint.
  void validate() const;

  friend bool operator==(const GaitPTConfig&, const GaitPTConfig&) = default;
};

/// Copy of `config` with exactly the stages in `active` enabled.
GaitPTConfig with_stages(const GaitPTConfig& config, const std::set<int>& active);

/// Small configuration for gradient checks: widths 8/16/32/64, one block per
/// encoder, two heads, four frames.
GaitPTConfig tiny_config();

}  // namespace gaitpt::model
