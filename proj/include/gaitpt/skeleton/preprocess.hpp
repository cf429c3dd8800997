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

#include <random>
#include <vector>

#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::skeleton {

/// Divides both coordinates of every joint by the frame width in pixels.
GaitSequence normalize_sequence(const GaitSequence& seq, double frame_width);

/// Keeps the sequences with at least `min_frames` frames, in input order.
std::vector<GaitSequence> filter_min_length(std::vector<GaitSequence> seqs,
                                            std::size_t min_frames);

enum class WindowMode {
  TrainRandom,  // uniformly drawn contiguous crop
  EvalHead,     // the first `length` frames
};

/// Contiguous `length`-frame slice of `seq`. TrainRandom needs `rng`.
/// Sequences shorter than `length` raise a too-short error.
GaitSequence sample_window(const GaitSequence& seq, std::size_t length, WindowMode mode,
                           std::mt19937_64* rng = nullptr);

}  // namespace gaitpt::skeleton
