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

#include "gaitpt/dataio/config.hpp"

#include <set>

#include "gaitpt/dataio/records.hpp"
#include "gaitpt/error.hpp"

namespace gaitpt::dataio {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::Config, path + ": " + what);
}

void require_object(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
}

void reject_unknown(const ordered_json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key())) bad(path + "." + it.key(), "unknown key");
}

double number(const ordered_json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

std::uint64_t whole(const ordered_json& v, const std::string& path) {
  if (!v.is_number_unsigned()) bad(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

long long integer(const ordered_json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<long long>();
}

bool boolean(const ordered_json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::string text(const ordered_json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

// Reads a per-stage quantity given as one integer or an array of four.
std::array<std::size_t, 4> per_stage(const ordered_json& v, const std::string& path) {
  std::array<std::size_t, 4> out{};
  if (v.is_array()) {
    if (v.size() != 4) bad(path, "expected 4 entries, one per stage");
    for (std::size_t i = 0; i < 4; ++i) out[i] = whole(v[i], path + "[" + std::to_string(i) + "]");
  } else {
    out.fill(whole(v, path));
  }
  return out;
}

template <typename F>
void with_key(const ordered_json& j, const char* key, const std::string& path, F&& f) {
  if (auto it = j.find(key); it != j.end()) f(*it, path + "." + key);
}

// Re-raises a validation failure from `fn` as a configuration error under `path`.
template <typename F>
void validated(const std::string& path, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Config) throw;
    bad(path, e.message());
  }
}

}  // namespace

ordered_json to_json(const model::GaitPTConfig& c) {
  ordered_json j;
  std::vector<std::size_t> dims, blocks, heads;
  std::vector<int> active;
  for (const auto& s : c.stages) {
    dims.push_back(s.dim);
    blocks.push_back(s.blocks);
    heads.push_back(s.heads);
    if (s.active) active.push_back(s.index);
  }
  j["dims"] = dims;
  j["blocks"] = blocks;
  j["heads"] = heads;
  j["stages"] = active;
  j["scheme"] = std::string(skeleton::to_string(c.scheme));
  j["sequence_length"] = c.sequence_length;
  j["output_dim"] = c.output_dim;
  j["ff_mult"] = c.ff_mult;
  j["spatial_pos"] = c.spatial_pos;
  j["temporal_pos"] = c.temporal_pos;
  j["dropout"] = c.dropout;
  return j;
}

ordered_json to_json(const training::TrainConfig& c) {
  ordered_json j;
  j["margin"] = c.margin;
  j["distance"] = std::string(training::to_string(c.distance));
  j["hinge"] = c.hinge;
  j["P"] = c.identities_per_batch;
  j["K"] = c.samples_per_identity;
  j["lr_min"] = c.lr_min;
  j["lr_max"] = c.lr_max;
  j["gamma"] = c.gamma;
  j["step_size"] = c.step_size;
  j["schedule_unit"] = std::string(training::to_string(c.schedule_unit));
  j["weight_decay"] = c.weight_decay;
  j["betas"] = {c.beta1, c.beta2};
  j["eps"] = c.eps;
  j["epochs"] = c.epochs;
  j["batches_per_epoch"] = c.batches_per_epoch;
  j["seed"] = c.seed;
  return j;
}

ordered_json to_json(const synthgait::SynthConfig& c) {
  ordered_json j;
  j["identities"] = c.identities;
  j["sequences_per_identity"] = c.sequences_per_identity;
  j["frames"] = c.frames;
  j["views"] = c.views;
  std::vector<std::string> conds;
  for (auto k : c.conditions) conds.emplace_back(skeleton::to_string(k));
  j["conditions"] = conds;
  j["train_per_view"] = c.train_per_view;
  j["noise"] = c.noise;
  j["frame_width"] = c.frame_width;
  j["frame_height"] = c.frame_height;
  j["seed"] = c.seed;
  return j;
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["model"] = to_json(c.model);
  j["train"] = to_json(c.train);
  j["synth"] = to_json(c.synth);
  return j;
}

model::GaitPTConfig model_config_from_json(const ordered_json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"dims", "blocks", "heads", "stages", "scheme", "sequence_length", "output_dim",
                           "ff_mult", "spatial_pos", "temporal_pos", "dropout"});
  model::GaitPTConfig c;
  with_key(j, "dims", path, [&](const ordered_json& v, const std::string& p) {
    if (!v.is_array()) bad(p, "expected an array of 4 widths");
    auto d = per_stage(v, p);
    for (std::size_t i = 0; i < 4; ++i) c.stages[i].dim = d[i];
  });
  with_key(j, "blocks", path, [&](const ordered_json& v, const std::string& p) {
    auto d = per_stage(v, p);
    for (std::size_t i = 0; i < 4; ++i) c.stages[i].blocks = d[i];
  });
  with_key(j, "heads", path, [&](const ordered_json& v, const std::string& p) {
    auto d = per_stage(v, p);
    for (std::size_t i = 0; i < 4; ++i) c.stages[i].heads = d[i];
  });
  with_key(j, "scheme", path, [&](const ordered_json& v, const std::string& p) {
    auto s = skeleton::parse_scheme(text(v, p));
    if (!s) bad(p, "expected one of HUL, HLR, OPPOSITE, ALL");
    c.scheme = *s;
  });
  with_key(j, "sequence_length", path, [&](const ordered_json& v, const std::string& p) { c.sequence_length = whole(v, p); });
  with_key(j, "output_dim", path, [&](const ordered_json& v, const std::string& p) { c.output_dim = whole(v, p); });
  with_key(j, "ff_mult", path, [&](const ordered_json& v, const std::string& p) { c.ff_mult = whole(v, p); });
  with_key(j, "spatial_pos", path, [&](const ordered_json& v, const std::string& p) { c.spatial_pos = boolean(v, p); });
  with_key(j, "temporal_pos", path, [&](const ordered_json& v, const std::string& p) { c.temporal_pos = boolean(v, p); });
  with_key(j, "dropout", path, [&](const ordered_json& v, const std::string& p) { c.dropout = number(v, p); });
  with_key(j, "stages", path, [&](const ordered_json& v, const std::string& p) {
    if (!v.is_array()) bad(p, "expected an array of stage indices");
    std::set<int> active;
    for (std::size_t i = 0; i < v.size(); ++i) active.insert(static_cast<int>(integer(v[i], p + "[" + std::to_string(i) + "]")));
    validated(p, [&] { c = model::with_stages(c, active); });
  });
  validated(path, [&] { c.validate(); });
  return c;
}

training::TrainConfig train_config_from_json(const ordered_json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"margin", "distance", "hinge", "P", "K", "lr_min", "lr_max", "gamma", "step_size",
                           "schedule_unit", "weight_decay", "betas", "eps", "epochs", "batches_per_epoch", "seed"});
  training::TrainConfig c;
  with_key(j, "margin", path, [&](const ordered_json& v, const std::string& p) { c.margin = number(v, p); });
  with_key(j, "distance", path, [&](const ordered_json& v, const std::string& p) {
    auto d = training::parse_distance(text(v, p));
    if (!d) bad(p, "only \"euclidean\" is supported");
    c.distance = *d;
  });
  with_key(j, "hinge", path, [&](const ordered_json& v, const std::string& p) { c.hinge = boolean(v, p); });
  with_key(j, "P", path, [&](const ordered_json& v, const std::string& p) { c.identities_per_batch = whole(v, p); });
  with_key(j, "K", path, [&](const ordered_json& v, const std::string& p) { c.samples_per_identity = whole(v, p); });
  with_key(j, "lr_min", path, [&](const ordered_json& v, const std::string& p) { c.lr_min = number(v, p); });
  with_key(j, "lr_max", path, [&](const ordered_json& v, const std::string& p) { c.lr_max = number(v, p); });
  with_key(j, "gamma", path, [&](const ordered_json& v, const std::string& p) { c.gamma = number(v, p); });
  with_key(j, "step_size", path, [&](const ordered_json& v, const std::string& p) { c.step_size = whole(v, p); });
  with_key(j, "schedule_unit", path, [&](const ordered_json& v, const std::string& p) {
    auto u = training::parse_schedule_unit(text(v, p));
    if (!u) bad(p, "expected \"epoch\" or \"iteration\"");
    c.schedule_unit = *u;
  });
  with_key(j, "weight_decay", path, [&](const ordered_json& v, const std::string& p) { c.weight_decay = number(v, p); });
  with_key(j, "betas", path, [&](const ordered_json& v, const std::string& p) {
    if (!v.is_array() || v.size() != 2) bad(p, "expected [beta1, beta2]");
    c.beta1 = number(v[0], p + "[0]");
    c.beta2 = number(v[1], p + "[1]");
  });
  with_key(j, "eps", path, [&](const ordered_json& v, const std::string& p) { c.eps = number(v, p); });
  with_key(j, "epochs", path, [&](const ordered_json& v, const std::string& p) { c.epochs = whole(v, p); });
  with_key(j, "batches_per_epoch", path, [&](const ordered_json& v, const std::string& p) { c.batches_per_epoch = whole(v, p); });
  with_key(j, "seed", path, [&](const ordered_json& v, const std::string& p) { c.seed = whole(v, p); });
  validated(path, [&] { c.validate(); });
  return c;
}

synthgait::SynthConfig synth_config_from_json(const ordered_json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"identities", "sequences_per_identity", "frames", "views", "conditions",
                           "train_per_view", "noise", "frame_width", "frame_height", "seed"});
  synthgait::SynthConfig c;
  with_key(j, "identities", path, [&](const ordered_json& v, const std::string& p) { c.identities = whole(v, p); });
  with_key(j, "sequences_per_identity", path, [&](const ordered_json& v, const std::string& p) { c.sequences_per_identity = whole(v, p); });
  with_key(j, "frames", path, [&](const ordered_json& v, const std::string& p) { c.frames = whole(v, p); });
  with_key(j, "views", path, [&](const ordered_json& v, const std::string& p) {
    if (!v.is_array()) bad(p, "expected an array of view angles");
    c.views.clear();
    for (std::size_t i = 0; i < v.size(); ++i) c.views.push_back(static_cast<int>(integer(v[i], p + "[" + std::to_string(i) + "]")));
  });
  with_key(j, "conditions", path, [&](const ordered_json& v, const std::string& p) {
    if (!v.is_array()) bad(p, "expected an array of conditions");
    c.conditions.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string q = p + "[" + std::to_string(i) + "]";
      auto cond = skeleton::parse_condition(text(v[i], q));
      if (!cond) bad(q, "expected NM, BG or CL");
      c.conditions.push_back(*cond);
    }
  });
  with_key(j, "train_per_view", path, [&](const ordered_json& v, const std::string& p) { c.train_per_view = whole(v, p); });
  with_key(j, "noise", path, [&](const ordered_json& v, const std::string& p) { c.noise = number(v, p); });
  with_key(j, "frame_width", path, [&](const ordered_json& v, const std::string& p) { c.frame_width = number(v, p); });
  with_key(j, "frame_height", path, [&](const ordered_json& v, const std::string& p) { c.frame_height = number(v, p); });
  with_key(j, "seed", path, [&](const ordered_json& v, const std::string& p) { c.seed = whole(v, p); });
  validated(path, [&] { c.validate(); });
  return c;
}

RunConfig run_config_from_json(const ordered_json& j) {
  require_object(j, "config");
  reject_unknown(j, "config", {"model", "train", "synth"});
  RunConfig c;
  if (j.contains("model")) c.model = model_config_from_json(j["model"], "model");
  if (j.contains("train")) c.train = train_config_from_json(j["train"], "train");
  if (j.contains("synth")) c.synth = synth_config_from_json(j["synth"], "synth");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  ordered_json j;
  try {
    j = ordered_json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Config, path.string() + ": invalid JSON at byte " + std::to_string(e.byte));
  }
  return run_config_from_json(j);
}

}  // namespace gaitpt::dataio
