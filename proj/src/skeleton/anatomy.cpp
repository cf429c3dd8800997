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

#include "gaitpt/skeleton/anatomy.hpp"

#include <algorithm>
#include <string>

#include "gaitpt/error.hpp"
#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::skeleton {

namespace {
constexpr std::size_t idx(Limb l) { return static_cast<std::size_t>(l); }
}  // namespace

const std::array<std::vector<std::size_t>, kLimbs>& anatomy_table() {
  static const std::array<std::vector<std::size_t>, kLimbs> table{{
      {0, 1, 2, 3, 4, 17},  // head incl. duplicated nose
      {5, 7, 9},            // left shoulder, elbow, wrist
      {6, 8, 10},
      {11, 13, 15},         // left hip, knee, ankle
      {12, 14, 16},
  }};
  return table;
}

std::string_view to_string(PartitionScheme s) noexcept {
  switch (s) {
    case PartitionScheme::HUL: return "HUL";
    case PartitionScheme::HLR: return "HLR";
    case PartitionScheme::OPPOSITE: return "OPPOSITE";
    case PartitionScheme::ALL: return "ALL";
  }
  return "HUL";
}

std::optional<PartitionScheme> parse_scheme(std::string_view s) noexcept {
  if (s == "HUL") return PartitionScheme::HUL;
  if (s == "HLR") return PartitionScheme::HLR;
  if (s == "OPPOSITE") return PartitionScheme::OPPOSITE;
  if (s == "ALL") return PartitionScheme::ALL;
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> stage3_groups(PartitionScheme scheme) {
  const std::size_t H = idx(Limb::Head), LA = idx(Limb::LeftArm), RA = idx(Limb::RightArm),
                    LL = idx(Limb::LeftLeg), RL = idx(Limb::RightLeg);
  switch (scheme) {
    case PartitionScheme::HUL: return {{H}, {LA, RA}, {LL, RL}};
    case PartitionScheme::HLR: return {{H}, {LA, LL}, {RA, RL}};
    case PartitionScheme::OPPOSITE: return {{H}, {LA, RL}, {RA, LL}};
    case PartitionScheme::ALL:
      return {{H}, {LA, RA}, {LL, RL}, {LA, LL}, {RA, RL}, {LA, RL}, {RA, LL}};
  }
  return {};
}

bool MergePlan::covers() const {
  std::vector<bool> seen(input_tokens, false);
  for (const auto& g : groups)
    for (auto i : g) {
      if (i >= input_tokens) return false;
      seen[i] = true;
    }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

bool MergePlan::disjoint() const {
  std::vector<int> count(input_tokens, 0);
  for (const auto& g : groups)
    for (auto i : g) {
      if (i >= input_tokens || ++count[i] > 1) return false;
    }
  return true;
}

MergePlan merge_plan(int stage, PartitionScheme scheme) {
  switch (stage) {
    case 1: {
      const auto& t = anatomy_table();
      return MergePlan{kJoints, {t.begin(), t.end()}};
    }
    case 2: return MergePlan{kLimbs, stage3_groups(scheme)};
    case 3: {
      const std::size_t n = token_count(3, scheme);
      std::vector<std::size_t> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = i;
      return MergePlan{n, {all}};
    }
    case 4: return MergePlan{1, {{0}}};
    default: break;
  }
  fail(ErrorKind::Config, "no stage " + std::to_string(stage) + "; stages are 1..4");
}

MergePlan compose(const MergePlan& first, const MergePlan& second) {
  if (second.input_tokens != first.output_tokens()) {
    fail(ErrorKind::Config, "cannot compose a plan with " + std::to_string(first.output_tokens()) +
                                " outputs into one expecting " +
                                std::to_string(second.input_tokens));
  }
  MergePlan out{first.input_tokens, {}};
  for (const auto& g : second.groups) {
    std::vector<std::size_t> members;
    for (auto i : g) members.insert(members.end(), first.groups[i].begin(), first.groups[i].end());
    out.groups.push_back(std::move(members));
  }
  return out;
}

std::size_t token_count(int stage, PartitionScheme scheme) {
  switch (stage) {
    case 1: return kJoints;
    case 2: return kLimbs;
    case 3: return stage3_groups(scheme).size();
    case 4: return 1;
    default: break;
  }
  fail(ErrorKind::Config, "no stage " + std::to_string(stage) + "; stages are 1..4");
}

}  // namespace gaitpt::skeleton
