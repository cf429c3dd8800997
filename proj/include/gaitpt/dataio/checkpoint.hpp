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

// Checkpoint layout:
//   bytes 0..7   magic "GAITPTCK"
//   bytes 8..15  header length H, little-endian uint64
//   next H bytes header JSON: format, version, dtype, config, params
//                [{name, shape}], payload_bytes, checksum (FNV-1a 64, hex)
//   remainder    parameter values, little-endian, in header order

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gaitpt/model/gaitpt.hpp"

namespace gaitpt::dataio {

inline constexpr std::string_view kCheckpointMagic = "GAITPTCK";
inline constexpr int kCheckpointVersion = 1;

struct CheckpointHeader {
  int version = 0;
  std::string dtype;  // "f32" or "f64"
  model::GaitPTConfig config;
  std::vector<std::pair<std::string, num::Shape>> params;
  std::uint64_t payload_bytes = 0;
  std::uint64_t checksum = 0;
  nlohmann::ordered_json extra;  // free-form metadata (e.g. epoch)
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

template <typename T>
void save_checkpoint(const model::GaitPTModel<T>& model, const std::filesystem::path& path,
                     const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

/// Rebuilds the model from the stored config and payload. When `expected`
/// is given, a differing stored config is a configuration error.
template <typename T>
model::GaitPTModel<T> load_checkpoint(const std::filesystem::path& path,
                                      const model::GaitPTConfig* expected = nullptr);

}  // namespace gaitpt::dataio
