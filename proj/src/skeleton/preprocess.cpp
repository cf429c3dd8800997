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

#include "gaitpt/skeleton/preprocess.hpp"

#include <algorithm>
#include <string>

#include "gaitpt/error.hpp"

namespace gaitpt::skeleton {

GaitSequence normalize_sequence(const GaitSequence& seq, double frame_width) {
  if (!(frame_width > 0.0)) {
    fail(ErrorKind::Input, "frame width must be positive, got " + std::to_string(frame_width));
  }
  GaitSequence out = seq;
  for (auto& pose : out.frames)
    for (auto& j : pose.joints) {
      j.x /= frame_width;
      j.y /= frame_width;
    }
  return out;
}

std::vector<GaitSequence> filter_min_length(std::vector<GaitSequence> seqs,
                                            std::size_t min_frames) {
  if (min_frames == 0) fail(ErrorKind::Input, "min_frames must be at least 1");
  std::erase_if(seqs, [&](const GaitSequence& s) { return s.length() < min_frames; });
  return seqs;
}

GaitSequence sample_window(const GaitSequence& seq, std::size_t length, WindowMode mode,
                           std::mt19937_64* rng) {
  if (length == 0) fail(ErrorKind::Input, "window length must be positive");
  if (seq.length() < length) {
    fail(ErrorKind::TooShort, "sequence '" + seq.key + "' has " + std::to_string(seq.length()) +
                                  " frames, window needs " + std::to_string(length));
  }
  std::size_t start = 0;
  if (mode == WindowMode::TrainRandom) {
    if (!rng) fail(ErrorKind::Usage, "random window sampling needs a generator");
    std::uniform_int_distribution<std::size_t> pick(0, seq.length() - length);
    start = pick(*rng);
  }
  GaitSequence out;
  out.key = seq.key;
  out.subject_id = seq.subject_id;
  out.condition = seq.condition;
  out.view = seq.view;
  out.session = seq.session;
  out.frames.assign(seq.frames.begin() + static_cast<std::ptrdiff_t>(start),
                    seq.frames.begin() + static_cast<std::ptrdiff_t>(start + length));
  return out;
}

}  // namespace gaitpt::skeleton
