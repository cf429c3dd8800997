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

#include "gaitpt/skeleton/pose.hpp"

#include "gaitpt/error.hpp"

namespace gaitpt::skeleton {

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case Condition::NM: return "NM";
    case Condition::BG: return "BG";
    case Condition::CL: return "CL";
    case Condition::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::optional<Condition> parse_condition(std::string_view s) noexcept {
  if (s == "NM") return Condition::NM;
  if (s == "BG") return Condition::BG;
  if (s == "CL") return Condition::CL;
  if (s == "OTHER") return Condition::OTHER;
  return std::nullopt;
}

Pose duplicate_nose(std::span<const Point> raw) {
  if (raw.size() != kRawJoints) {
    fail(ErrorKind::Format, "expected " + std::to_string(kRawJoints) + " joints, got " +
                                std::to_string(raw.size()));
  }
  Pose p;
  for (std::size_t j = 0; j < kRawJoints; ++j) p.joints[j] = raw[j];
  p.joints[kDuplicatedNose] = raw[kNose];
  return p;
}

}  // namespace gaitpt::skeleton
