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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaitpt::skeleton {

/// Joints emitted by COCO-style pose estimators.
inline constexpr std::size_t kRawJoints = 17;
/// Joints used by the model: the raw 17 plus a duplicated nose at index 17.
inline constexpr std::size_t kJoints = 18;
inline constexpr std::size_t kNose = 0;
inline constexpr std::size_t kDuplicatedNose = 17;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Pose {
  std::array<Point, kJoints> joints{};
  friend bool operator==(const Pose&, const Pose&) = default;
};

enum class Condition { NM, BG, CL, OTHER };

std::string_view to_string(Condition c) noexcept;
std::optional<Condition> parse_condition(std::string_view s) noexcept;

struct GaitSequence {
  std::string key;
  std::string subject_id;
  Condition condition = Condition::NM;
  int view = 0;     // degrees
  int session = 1;  // 1-based, numbered per condition
  std::vector<Pose> frames;

  std::size_t length() const noexcept { return frames.size(); }
};

/// Appends the duplicated nose to a 17-joint COCO pose. Any other joint count
/// (including an already-18-joint pose) is a format error.
Pose duplicate_nose(std::span<const Point> raw);

}  // namespace gaitpt::skeleton
