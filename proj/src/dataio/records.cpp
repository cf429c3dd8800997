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

#include "gaitpt/dataio/records.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gaitpt/error.hpp"
#include "gaitpt/skeleton/preprocess.hpp"

namespace gaitpt::dataio {

using nlohmann::ordered_json;
using skeleton::GaitSequence;

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "read failed for " + path.string());
  return ss.str();
}

std::string format_record(const SequenceRecord& record) {
  const auto& s = record.sequence;
  ordered_json j;
  j["key"] = s.key;
  j["subject_id"] = s.subject_id;
  j["condition"] = std::string(skeleton::to_string(s.condition));
  j["view"] = s.view;
  j["session"] = s.session;
  j["frame_width"] = record.frame_width;
  ordered_json frames = ordered_json::array();
  for (const auto& pose : s.frames) {
    ordered_json f = ordered_json::array();
    for (std::size_t k = 0; k < skeleton::kRawJoints; ++k) f.push_back({pose.joints[k].x, pose.joints[k].y});
    frames.push_back(std::move(f));
  }
  j["frames"] = std::move(frames);
  return j.dump();
}

namespace {

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  fail(ErrorKind::Format, "line " + std::to_string(line_no) + ": " + what);
}

const ordered_json& field(const ordered_json& j, const char* name, std::size_t line_no) {
  auto it = j.find(name);
  if (it == j.end()) bad_line(line_no, std::string("missing field '") + name + "'");
  return *it;
}

}  // namespace

SequenceRecord parse_record(std::string_view line, std::size_t line_no) {
  ordered_json j = ordered_json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) bad_line(line_no, "not valid JSON");
  if (!j.is_object()) bad_line(line_no, "record must be a JSON object");

  SequenceRecord rec;
  auto& s = rec.sequence;
  const auto& key = field(j, "key", line_no);
  const auto& subject = field(j, "subject_id", line_no);
  const auto& condition = field(j, "condition", line_no);
  const auto& view = field(j, "view", line_no);
  const auto& width = field(j, "frame_width", line_no);
  const auto& frames = field(j, "frames", line_no);
  if (!key.is_string() || key.get_ref<const std::string&>().empty()) bad_line(line_no, "'key' must be a nonempty string");
  if (!subject.is_string()) bad_line(line_no, "'subject_id' must be a string");
  if (!condition.is_string()) bad_line(line_no, "'condition' must be a string");
  if (!view.is_number_integer()) bad_line(line_no, "'view' must be an integer");
  if (!width.is_number() || !(width.get<double>() > 0.0)) bad_line(line_no, "'frame_width' must be a positive number");
  if (!frames.is_array() || frames.empty()) bad_line(line_no, "'frames' must be a nonempty array");

  s.key = key.get<std::string>();
  s.subject_id = subject.get<std::string>();
  auto cond = skeleton::parse_condition(condition.get<std::string>());
  if (!cond) bad_line(line_no, "unknown condition '" + condition.get<std::string>() + "'");
  s.condition = *cond;
  s.view = view.get<int>();
  if (auto it = j.find("session"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) bad_line(line_no, "'session' must be a positive integer");
    s.session = it->get<int>();
  }
  rec.frame_width = width.get<double>();

  s.frames.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& fr = frames[f];
    if (!fr.is_array()) bad_line(line_no, "frame " + std::to_string(f) + " is not an array");
    if (fr.size() != skeleton::kRawJoints) {
      bad_line(line_no, "frame " + std::to_string(f) + " has " + std::to_string(fr.size()) +
                            " joints, expected " + std::to_string(skeleton::kRawJoints));
    }
    std::array<skeleton::Point, skeleton::kRawJoints> raw{};
    for (std::size_t k = 0; k < skeleton::kRawJoints; ++k) {
      const auto& p = fr[k];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        bad_line(line_no, "frame " + std::to_string(f) + " joint " + std::to_string(k) + " is not an [x, y] pair");
      }
      raw[k] = {p[0].get<double>(), p[1].get<double>()};
    }
    s.frames.push_back(skeleton::duplicate_nose(raw));
  }
  return rec;
}

void write_records(const std::filesystem::path& path, std::span<const SequenceRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += format_record(r);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<SequenceRecord> read_records(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<SequenceRecord> out;
  std::set<std::string> keys;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse_record(line, line_no));
    } catch (const Error& e) {
      fail(e.kind(), path.string() + ": " + e.message());
    }
    if (!keys.insert(out.back().sequence.key).second) {
      fail(ErrorKind::Format, path.string() + ": line " + std::to_string(line_no) + ": duplicate key '" +
                                  out.back().sequence.key + "'");
    }
  }
  return out;
}

std::vector<GaitSequence> read_sequences(const std::filesystem::path& path) {
  std::vector<GaitSequence> out;
  for (auto& r : read_records(path)) out.push_back(skeleton::normalize_sequence(r.sequence, r.frame_width));
  return out;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  ordered_json j;
  j["format"] = "gaitpt-manifest";
  j["version"] = 1;
  j["name"] = m.name;
  j["generator"] = m.generator;
  j["seed"] = m.seed;
  j["files"] = m.files;
  j["splits"] = {{"train", m.train}, {"gallery", m.gallery}, {"probe", m.probe}};
  write_file(path, j.dump(2) + "\n");
}

namespace {

std::vector<std::string> string_list(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::Format, where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) fail(ErrorKind::Format, where + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  ordered_json j = ordered_json::parse(text, nullptr, false);
  const std::string where = path.string();
  if (j.is_discarded() || !j.is_object()) fail(ErrorKind::Format, where + ": not a JSON object");
  static const std::set<std::string> allowed{"format", "version", "name", "generator", "seed", "files", "splits"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key())) fail(ErrorKind::Format, where + ": unknown key '" + it.key() + "'");
  if (j.value("format", std::string()) != "gaitpt-manifest") fail(ErrorKind::Format, where + ": not a gaitpt manifest");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1) {
    fail(ErrorKind::Format, where + ": unsupported manifest version");
  }
  Manifest m;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(ErrorKind::Format, where + ": 'name' must be a string");
    m.name = j["name"].get<std::string>();
  }
  if (j.contains("generator")) {
    if (!j["generator"].is_string()) fail(ErrorKind::Format, where + ": 'generator' must be a string");
    m.generator = j["generator"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail(ErrorKind::Format, where + ": 'seed' must be a non-negative integer");
    m.seed = j["seed"].get<std::uint64_t>();
  }
  if (!j.contains("files")) fail(ErrorKind::Format, where + ": missing 'files'");
  m.files = string_list(j["files"], where + ": 'files'");
  if (!j.contains("splits") || !j["splits"].is_object()) fail(ErrorKind::Format, where + ": missing 'splits' object");
  const auto& sp = j["splits"];
  for (auto it = sp.begin(); it != sp.end(); ++it) {
    if (it.key() != "train" && it.key() != "gallery" && it.key() != "probe") {
      fail(ErrorKind::Format, where + ": unknown split '" + it.key() + "'");
    }
  }
  if (sp.contains("train")) m.train = string_list(sp["train"], where + ": 'splits.train'");
  if (sp.contains("gallery")) m.gallery = string_list(sp["gallery"], where + ": 'splits.gallery'");
  if (sp.contains("probe")) m.probe = string_list(sp["probe"], where + ": 'splits.probe'");

  std::map<std::string, std::string> owner;
  for (const auto* split : {&m.train, &m.gallery, &m.probe}) {
    const char* name = split == &m.train ? "train" : split == &m.gallery ? "gallery" : "probe";
    for (const auto& k : *split) {
      auto [it, fresh] = owner.emplace(k, name);
      if (!fresh) {
        fail(ErrorKind::Format, where + ": key '" + k + "' appears in both " + it->second + " and " + name);
      }
    }
  }
  const auto dir = path.parent_path();
  for (const auto& f : m.files) {
    if (!std::filesystem::exists(dir / f)) fail(ErrorKind::Io, where + ": referenced file " + (dir / f).string() + " does not exist");
  }
  return m;
}

skeleton::SplitDataset load_split_dataset(const std::filesystem::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  std::map<std::string, GaitSequence> by_key;
  for (const auto& f : m.files) {
    for (auto& s : read_sequences(manifest_path.parent_path() / f)) {
      const std::string key = s.key;
      if (!by_key.emplace(key, std::move(s)).second) {
        fail(ErrorKind::Format, "key '" + key + "' occurs in more than one record file");
      }
    }
  }
  skeleton::SplitDataset d;
  auto take = [&](const std::vector<std::string>& keys, std::vector<GaitSequence>& into, const char* split) {
    for (const auto& k : keys) {
      auto it = by_key.find(k);
      if (it == by_key.end()) {
        fail(ErrorKind::Format, manifest_path.string() + ": " + split + " key '" + k + "' has no record");
      }
      into.push_back(it->second);
    }
  };
  take(m.train, d.train, "train");
  take(m.gallery, d.gallery, "gallery");
  take(m.probe, d.probe, "probe");
  return d;
}

}  // namespace gaitpt::dataio
