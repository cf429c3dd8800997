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
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitpt/dataio/config.hpp"

namespace gaitpt::cli {

/// Bad command-line input (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flags shared by every command.
struct Common {
  std::optional<std::uint64_t> seed;
  std::filesystem::path config;  // empty: built-in defaults
  bool json = false;
};

struct SynthArgs {
  std::filesystem::path out;
  std::optional<std::size_t> identities, sequences, frames, train_per_view;
  std::optional<double> noise;
  std::vector<int> views;
  std::vector<std::string> conditions;
};

struct TrainArgs {
  std::filesystem::path data, out, log;
  std::string stages;  // "1,2,3,4"
  std::string scheme;
  std::optional<std::size_t> epochs;
  std::size_t eval_every = 0;
};

struct EmbedArgs {
  std::filesystem::path input, ckpt, out;
};

struct EvalArgs {
  std::filesystem::path gallery, probe, ckpt;
  std::filesystem::path data;  // alternative to --gallery/--probe: manifest splits
  std::string protocol = "rankk";
  std::vector<std::size_t> ks{1, 5, 10, 20};
};

struct AblateArgs {
  std::filesystem::path data;
  std::string subsets = "4|1,4|1,2,4|1,2,3,4";
  std::size_t runs = 5;
  bool ttest = true;
  std::optional<std::size_t> epochs;
};

struct GradcheckArgs {
  std::string size = "tiny";
  double tol = 1e-4;
};

struct PartitionArgs {
  std::filesystem::path data;
  std::size_t runs = 1;
  std::optional<std::size_t> epochs;
};

/// Parses "1,2,4" into a stage set; anything else is a usage error.
std::set<int> parse_stage_list(const std::string& text);
/// Parses "4|1,4|1,2,3,4".
std::vector<std::set<int>> parse_subsets(const std::string& text);

/// Each command writes its report to `out` and progress to `err`; the return
/// value is the process exit code when no exception escapes.
int run_synth(const Common& c, const SynthArgs& a, std::ostream& out, std::ostream& err);
int run_train(const Common& c, const TrainArgs& a, std::ostream& out, std::ostream& err);
int run_embed(const Common& c, const EmbedArgs& a, std::ostream& out, std::ostream& err);
int run_eval(const Common& c, const EvalArgs& a, std::ostream& out, std::ostream& err);
int run_ablate(const Common& c, const AblateArgs& a, std::ostream& out, std::ostream& err);
int run_gradcheck(const Common& c, const GradcheckArgs& a, std::ostream& out, std::ostream& err);
int run_partition_study(const Common& c, const PartitionArgs& a, std::ostream& out, std::ostream& err);

}  // namespace gaitpt::cli
