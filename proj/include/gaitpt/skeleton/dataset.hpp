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

#include <vector>

#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::skeleton {

/// Sequences partitioned for metric learning and retrieval.
struct SplitDataset {
  std::vector<GaitSequence> train;
  std::vector<GaitSequence> gallery;
  std::vector<GaitSequence> probe;
};

}  // namespace gaitpt::skeleton
