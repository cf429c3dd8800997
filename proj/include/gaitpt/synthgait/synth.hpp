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
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "gaitpt/skeleton/dataset.hpp"
#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::synthgait {

/// Body and gait parameters of one synthetic walker. Lengths are in units of
/// standing height; angles in radians.
struct IdentityParams {
  double head = 0.03;           // nose to eye/ear spacing
  double neck = 0.08;
  double torso = 0.30;
  double shoulder_half = 0.10;  // half shoulder width
  double hip_half = 0.07;
  double upper_arm = 0.17;
  double forearm = 0.15;
  double thigh = 0.25;
  double shin = 0.25;
  double frequency = 0.035;     // cycles per frame
  double leg_swing = 0.35;
  double knee_flex = 0.5;
  double arm_swing = 0.35;
  double elbow_flex = 0.25;
  double bob = 0.01;            // vertical hip oscillation amplitude
  double lean = 0.0;            // forward torso lean
  /// Phase offsets of head, left arm, right arm, left leg, right leg (limb order).
  std::array<double, 5> phase{};
  double noise = 0.0;           // Gaussian joint jitter, in units of frame width

  /// Throws a configuration error naming the first violated range.
  void validate() const;
  /// Every field in declaration order, phases included.
  std::vector<double> as_vector() const;
  friend bool operator==(const IdentityParams&, const IdentityParams&) = default;
};

struct SynthConfig {
  std::size_t identities = 8;
  std::size_t sequences_per_identity = 4;  // per view
  std::size_t frames = 60;
  std::vector<int> views{36, 90};
  std::vector<skeleton::Condition> conditions{skeleton::Condition::NM};
  std::size_t train_per_view = 2;  // sequences 1..train_per_view of each identity and view
  double noise = 0.002;
  double frame_width = 640.0;
  double frame_height = 480.0;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

IdentityParams sample_identity(std::mt19937_64& rng);

/// Pixel-space walker (frame_width x frame_height image, y pointing down).
skeleton::GaitSequence generate_pixel_sequence(const IdentityParams& id, int view,
                                               skeleton::Condition condition, std::size_t frames,
                                               std::mt19937_64& rng, double frame_width = 640.0,
                                               double frame_height = 480.0);

/// Width-normalized, 18-joint sequence.
skeleton::GaitSequence generate_sequence(const IdentityParams& id, int view,
                                         skeleton::Condition condition, std::size_t frames,
                                         std::mt19937_64& rng, double frame_width = 640.0,
                                         double frame_height = 480.0);

/// Where a generated sequence goes.
enum class Split { Train, Gallery, Probe };

struct GeneratedSequence {
  skeleton::GaitSequence pixels;  // 18 joints, pixel coordinates
  Split split = Split::Probe;
};

/// All sequences of `cfg`, ordered by identity, view, sequence index. For
/// every identity and view, sequence 0 (NM) is the gallery entry, sequences
/// 1..train_per_view train and the rest are probes.
std::vector<GeneratedSequence> generate_dataset(const SynthConfig& cfg);

/// Width-normalized splits of generate_dataset(cfg).
skeleton::SplitDataset make_split_dataset(const SynthConfig& cfg);

/// Writes `sequences.jsonl` and `manifest.json` into `dir` (created if
/// needed) and returns the manifest path.
std::filesystem::path build_dataset(const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace gaitpt::synthgait
