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
#include <optional>
#include <string_view>
#include <vector>

namespace gaitpt::skeleton {

// COCO-17 order: 0 nose, 1/2 eyes, 3/4 ears, 5/6 shoulders, 7/8 elbows,
// 9/10 wrists, 11/12 hips, 13/14 knees, 15/16 ankles; 17 duplicated nose.
// Odd indices are the left side.

enum class Limb : std::size_t { Head = 0, LeftArm, RightArm, LeftLeg, RightLeg };
inline constexpr std::size_t kLimbs = 5;

/// Joint membership of every limb token, in limb order.
const std::array<std::vector<std::size_t>, kLimbs>& anatomy_table();

enum class PartitionScheme {
  HUL,       // head, upper body (both arms), legs
  HLR,       // head, left side, right side
  OPPOSITE,  // head, left arm + right leg, right arm + left leg
  ALL,       // every distinct group of the three schemes above
};

std::string_view to_string(PartitionScheme s) noexcept;
std::optional<PartitionScheme> parse_scheme(std::string_view s) noexcept;

/// Limb-index groups that form the stage-3 tokens of `scheme`.
std::vector<std::vector<std::size_t>> stage3_groups(PartitionScheme scheme);

/// How the tokens of one granularity combine into the next: output token i
/// merges `groups[i]` of the `input_tokens` inputs, concatenated in order.
struct MergePlan {
  std::size_t input_tokens = 0;
  std::vector<std::vector<std::size_t>> groups;

  std::size_t output_tokens() const noexcept { return groups.size(); }
  /// Every input index appears in at least one group.
  bool covers() const;
  /// Groups are pairwise disjoint.
  bool disjoint() const;
};

/// Plan leaving `stage`: 1 maps 18 joints to 5 limbs, 2 maps limbs to the
/// scheme's groups, 3 merges everything into one token, and 4 (the last
/// stage) is the identity on its single token. Throws on other stages.
MergePlan merge_plan(int stage, PartitionScheme scheme);

/// Plan equivalent to applying `first` then `second`.
MergePlan compose(const MergePlan& first, const MergePlan& second);

/// Token count at the input of `stage`: 18, 5, 3 (7 under ALL), 1.
std::size_t token_count(int stage, PartitionScheme scheme);

}  // namespace gaitpt::skeleton
