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

#include "gaitpt/model/config.hpp"

#include <string>

#include "gaitpt/error.hpp"

namespace gaitpt::model {

std::vector<int> GaitPTConfig::active_stages() const {
  std::vector<int> out;
  for (const auto& s : stages)
    if (s.active) out.push_back(s.index);
  return out;
}

void GaitPTConfig::validate() const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string where = "stage " + std::to_string(i + 1);
    check(s.index == static_cast<int>(i + 1), ErrorKind::Config, where + ": index out of order");
    check(s.dim > 0, ErrorKind::Config, where + ": dim must be positive");
    check(s.blocks > 0, ErrorKind::Config, where + ": blocks must be positive");
    check(s.heads > 0 && s.dim % s.heads == 0, ErrorKind::Config,
          where + ": dim " + std::to_string(s.dim) + " not divisible by heads " +
              std::to_string(s.heads));
  }
  check(!stage(4).has_spatial, ErrorKind::Config, "stage 4 cannot have spatial attention");
  check(!active_stages().empty(), ErrorKind::Config, "at least one stage must be active");
  check(output_dim > 0, ErrorKind::Config, "output_dim must be positive");
  check(sequence_length > 0, ErrorKind::Config, "sequence_length must be positive");
  check(ff_mult > 0, ErrorKind::Config, "ff_mult must be positive");
  check(dropout >= 0.0 && dropout < 1.0, ErrorKind::Config, "dropout must lie in [0, 1)");
}

GaitPTConfig with_stages(const GaitPTConfig& config, const std::set<int>& active) {
  if (active.empty()) fail(ErrorKind::Config, "stage subset must be nonempty");
  for (int s : active) {
    if (s < 1 || s > 4) fail(ErrorKind::Config, "no stage " + std::to_string(s) + "; stages are 1..4");
  }
  GaitPTConfig out = config;
  for (auto& s : out.stages) s.active = active.contains(s.index);
  return out;
}

GaitPTConfig tiny_config() {
  GaitPTConfig c;
  const std::size_t dims[4] = {8, 16, 32, 64};
  for (std::size_t i = 0; i < 4; ++i) {
    c.stages[i].dim = dims[i];
    c.stages[i].blocks = 1;
    c.stages[i].heads = 2;
  }
  c.sequence_length = 4;
  c.output_dim = 16;
  return c;
}

}  // namespace gaitpt::model
