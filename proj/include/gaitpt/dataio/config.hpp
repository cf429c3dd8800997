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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gaitpt/model/config.hpp"
#include "gaitpt/synthgait/synth.hpp"
#include "gaitpt/training/config.hpp"

namespace gaitpt::dataio {

struct RunConfig {
  model::GaitPTConfig model;
  training::TrainConfig train;
  synthgait::SynthConfig synth;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::ordered_json to_json(const model::GaitPTConfig& c);
nlohmann::ordered_json to_json(const training::TrainConfig& c);
nlohmann::ordered_json to_json(const synthgait::SynthConfig& c);
nlohmann::ordered_json to_json(const RunConfig& c);

/// Missing keys take defaults; unknown keys and type or range violations are
/// configuration errors naming the key path (e.g. "train.margin").
model::GaitPTConfig model_config_from_json(const nlohmann::ordered_json& j, const std::string& path = "model");
training::TrainConfig train_config_from_json(const nlohmann::ordered_json& j, const std::string& path = "train");
synthgait::SynthConfig synth_config_from_json(const nlohmann::ordered_json& j, const std::string& path = "synth");
RunConfig run_config_from_json(const nlohmann::ordered_json& j);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace gaitpt::dataio
