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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitpt/skeleton/dataset.hpp"
#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::dataio {

/// One on-disk sequence: pixel coordinates plus the frame width used to
/// normalize them. In memory the pose carries 18 joints; 17 are written.
struct SequenceRecord {
  skeleton::GaitSequence sequence;
  double frame_width = 0.0;
};

/// Single JSON line (no trailing newline).
std::string format_record(const SequenceRecord& record);
/// Parses one line; errors name `line_no`.
SequenceRecord parse_record(std::string_view line, std::size_t line_no);

void write_records(const std::filesystem::path& path, std::span<const SequenceRecord> records);
std::vector<SequenceRecord> read_records(const std::filesystem::path& path);

/// Records of `path`, width-normalized.
std::vector<skeleton::GaitSequence> read_sequences(const std::filesystem::path& path);

struct Manifest {
  std::string name;
  std::string generator;  // provenance, e.g. "synthgait"
  std::uint64_t seed = 0;
  std::vector<std::string> files;  // relative to the manifest's directory
  std::vector<std::string> train;
  std::vector<std::string> gallery;
  std::vector<std::string> probe;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
/// Checks that referenced files exist and split keys are disjoint.
Manifest read_manifest(const std::filesystem::path& path);

/// Reads every file of the manifest and assigns sequences to splits.
skeleton::SplitDataset load_split_dataset(const std::filesystem::path& manifest_path);

/// Writes `bytes` to `path`, replacing any existing file.
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace gaitpt::dataio
