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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <functional>
#include <filesystem>
#include <random>

#include "gaitpt/dataio/checkpoint.hpp"
#include "gaitpt/dataio/config.hpp"
#include "gaitpt/dataio/records.hpp"
#include "gaitpt/error.hpp"
#include "gaitpt/numcore/autodiff.hpp"
#include "gaitpt/synthgait/synth.hpp"

using namespace gaitpt;
using namespace gaitpt::dataio;
using nlohmann::ordered_json;
using skeleton::Condition;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("gaitpt_dataio_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SequenceRecord random_record(std::mt19937_64& rng, std::size_t frames, const std::string& key) {
  std::uniform_real_distribution<double> u(0.0, 640.0);
  std::array<skeleton::Point, skeleton::kRawJoints> raw{};
  SequenceRecord r;
  r.frame_width = 640.0;
  r.sequence.key = key;
  r.sequence.subject_id = key.substr(0, 3);
  r.sequence.condition = Condition::BG;
  r.sequence.view = 72;
  r.sequence.session = 2;
  for (std::size_t t = 0; t < frames; ++t) {
    for (auto& p : raw) p = {u(rng), u(rng) * 0.75};
    r.sequence.frames.push_back(skeleton::duplicate_nose(raw));
  }
  return r;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Input;
}

template <typename F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

template <typename T>
std::vector<T> embed_fixed(const model::GaitPTModel<T>& m) {
  const std::size_t n = m.config().sequence_length;
  num::Tensor<T> x({n, 18, 2});
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = static_cast<T>(std::sin(0.37 * static_cast<double>(i)));
  num::TapeScope<T> off(nullptr);
  auto y = m.forward(num::Var<T>(x));
  return {y.value().data().begin(), y.value().data().end()};
}

}  // namespace

TEST_CASE("single-frame record round-trips byte-identically") {
  std::mt19937_64 rng(1);
  const auto rec = random_record(rng, 1, "001-BG-02-072");
  const std::string line = format_record(rec);
  const auto back = parse_record(line, 1);
  CHECK(format_record(back) == line);
  CHECK(back.sequence.frames == rec.sequence.frames);
  CHECK(back.sequence.session == 2);
  CHECK(back.frame_width == 640.0);

  const auto dir = scratch("roundtrip");
  std::vector<SequenceRecord> one{rec};
  write_records(dir / "a.jsonl", one);
  write_records(dir / "b.jsonl", read_records(dir / "a.jsonl"));
  CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("record with a short frame names the line") {
  std::mt19937_64 rng(2);
  auto good = format_record(random_record(rng, 3, "001-NM-01-000"));
  auto j = ordered_json::parse(good);
  j["key"] = "002-NM-01-000";
  j["frames"][1].erase(16);
  const auto dir = scratch("short");
  write_file(dir / "s.jsonl", good + "\n\n" + j.dump() + "\n");
  const auto msg = message_of([&] { read_records(dir / "s.jsonl"); });
  CHECK(kind_of([&] { read_records(dir / "s.jsonl"); }) == ErrorKind::Format);
  CHECK(contains(msg, "line 3"));
  CHECK(contains(msg, "16 joints"));
  CHECK(contains(msg, "s.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("record field errors") {
  std::mt19937_64 rng(3);
  const auto base = ordered_json::parse(format_record(random_record(rng, 2, "001-NM-01-000")));
  for (const char* f : {"key", "subject_id", "condition", "view", "frame_width", "frames"}) {
    auto j = base;
    j.erase(f);
    const auto msg = message_of([&] { parse_record(j.dump(), 7); });
    CHECK(contains(msg, "line 7"));
    CHECK(contains(msg, f));
  }
  auto j = base;
  j["frame_width"] = 0;
  CHECK(kind_of([&] { parse_record(j.dump(), 1); }) == ErrorKind::Format);
  j = base;
  j["condition"] = "XX";
  CHECK(kind_of([&] { parse_record(j.dump(), 1); }) == ErrorKind::Format);
  j = base;
  j["frames"] = ordered_json::array();
  CHECK(kind_of([&] { parse_record(j.dump(), 1); }) == ErrorKind::Format);
  j = base;
  j.erase("session");
  CHECK(parse_record(j.dump(), 1).sequence.session == 1);
  CHECK(kind_of([&] { parse_record("[1, 2]", 1); }) == ErrorKind::Format);
  CHECK(kind_of([&] { parse_record("{", 1); }) == ErrorKind::Format);

  const auto dir = scratch("dupe");
  const std::string line = base.dump();
  write_file(dir / "d.jsonl", line + "\n" + line + "\n");
  const auto msg = message_of([&] { read_records(dir / "d.jsonl"); });
  CHECK(contains(msg, "line 2"));
  CHECK(contains(msg, "duplicate"));
  CHECK(kind_of([&] { read_records(dir / "missing.jsonl"); }) == ErrorKind::Io);
  fs::remove_all(dir);
}

TEST_CASE("100-record fixture loads with the duplicated nose") {
  std::mt19937_64 rng(4);
  std::vector<SequenceRecord> recs;
  for (int i = 0; i < 100; ++i) {
    char key[32];
    std::snprintf(key, sizeof key, "%03d-BG-02-072", i);
    recs.push_back(random_record(rng, 1 + i % 7, key));
  }
  const auto dir = scratch("fixture");
  write_records(dir / "f.jsonl", recs);
  const auto seqs = read_sequences(dir / "f.jsonl");
  REQUIRE(seqs.size() == 100);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    CHECK(seqs[i].length() == recs[i].sequence.length());
    for (std::size_t t = 0; t < seqs[i].length(); ++t) {
      const auto& p = seqs[i].frames[t].joints;
      CHECK(p[17] == p[0]);
      // Width normalization divides both coordinates by the frame width.
      CHECK(p[3].x == doctest::Approx(recs[i].sequence.frames[t].joints[3].x / 640.0));
      CHECK(p[3].y == doctest::Approx(recs[i].sequence.frames[t].joints[3].y / 640.0));
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("manifest round trip and validation") {
  const auto dir = scratch("manifest");
  write_file(dir / "seq.jsonl", "");
  Manifest m{"demo", "synthgait", 9, {"seq.jsonl"}, {"a", "b"}, {"c"}, {"d"}};
  write_manifest(dir / "m.json", m);
  CHECK(read_manifest(dir / "m.json") == m);

  Manifest overlap = m;
  overlap.probe.push_back("a");
  write_manifest(dir / "o.json", overlap);
  const auto msg = message_of([&] { read_manifest(dir / "o.json"); });
  CHECK(contains(msg, "'a'"));
  CHECK(contains(msg, "train"));
  CHECK(contains(msg, "probe"));

  Manifest missing = m;
  missing.files.push_back("nope.jsonl");
  write_manifest(dir / "x.json", missing);
  CHECK(kind_of([&] { read_manifest(dir / "x.json"); }) == ErrorKind::Io);
  CHECK(contains(message_of([&] { read_manifest(dir / "x.json"); }), "nope.jsonl"));

  auto j = ordered_json::parse(read_file(dir / "m.json"));
  j["extra"] = 1;
  write_file(dir / "u.json", j.dump());
  CHECK(kind_of([&] { read_manifest(dir / "u.json"); }) == ErrorKind::Format);

  write_manifest(dir / "k.json", m);
  CHECK(contains(message_of([&] { load_split_dataset(dir / "k.json"); }), "has no record"));
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip is bitwise") {
  const auto dir = scratch("ckpt");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto cfg = model::tiny_config();
    cfg.spatial_pos = seed % 2 == 0;
    model::GaitPTModel<float> m(cfg, seed);
    save_checkpoint(m, dir / "m.ckpt", {{"epoch", 3}});
    auto back = load_checkpoint<float>(dir / "m.ckpt");
    CHECK(back.config() == cfg);
    const auto& a = m.parameters().all();
    const auto& b = back.parameters().all();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(std::memcmp(a[i].var.value().ptr(), b[i].var.value().ptr(), a[i].var.size() * sizeof(float)) == 0);
    }
    const auto ea = embed_fixed(m), eb = embed_fixed(back);
    CHECK(std::memcmp(ea.data(), eb.data(), ea.size() * sizeof(float)) == 0);
    const auto h = read_checkpoint_header(dir / "m.ckpt");
    CHECK(h.extra["epoch"] == 3);
    CHECK(h.dtype == "f32");
    CHECK(h.payload_bytes == m.param_count() * sizeof(float));
    CHECK(h.config == cfg);
  }
  model::GaitPTModel<double> d(model::tiny_config(), 5);
  save_checkpoint(d, dir / "d.ckpt");
  auto dback = load_checkpoint<double>(dir / "d.ckpt");
  CHECK(embed_fixed(d) == embed_fixed(dback));
  CHECK(kind_of([&] { load_checkpoint<float>(dir / "d.ckpt"); }) == ErrorKind::Config);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint corruption and truncation are detected") {
  const auto dir = scratch("corrupt");
  model::GaitPTModel<float> m(model::tiny_config(), 7);
  save_checkpoint(m, dir / "m.ckpt");
  const std::string bytes = read_file(dir / "m.ckpt");
  const auto h = read_checkpoint_header(dir / "m.ckpt");
  const std::size_t payload_start = bytes.size() - h.payload_bytes;

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::string c = bytes;
    const std::size_t at = payload_start + rng() % h.payload_bytes;
    c[at] = static_cast<char>(c[at] ^ (1u << (rng() % 8)));
    write_file(dir / "c.ckpt", c);
    CHECK(kind_of([&] { load_checkpoint<float>(dir / "c.ckpt"); }) == ErrorKind::Integrity);
  }

  write_file(dir / "t.ckpt", bytes.substr(0, bytes.size() - 10));
  const auto msg = message_of([&] { load_checkpoint<float>(dir / "t.ckpt"); });
  CHECK(kind_of([&] { load_checkpoint<float>(dir / "t.ckpt"); }) == ErrorKind::Integrity);
  CHECK(contains(msg, "expected " + std::to_string(h.payload_bytes)));
  CHECK(contains(msg, "found " + std::to_string(h.payload_bytes - 10)));

  std::string v = bytes;
  const auto pos = v.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  v[pos + 10] = '2';
  write_file(dir / "v.ckpt", v);
  CHECK(contains(message_of([&] { load_checkpoint<float>(dir / "v.ckpt"); }), "version 2"));

  write_file(dir / "n.ckpt", "not a checkpoint at all");
  CHECK(kind_of([&] { load_checkpoint<float>(dir / "n.ckpt"); }) == ErrorKind::Format);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint config mismatch") {
  const auto dir = scratch("mismatch");
  auto cfg = model::tiny_config();
  model::GaitPTModel<float> m(cfg, 1);
  save_checkpoint(m, dir / "m.ckpt");
  CHECK_NOTHROW(load_checkpoint<float>(dir / "m.ckpt", &cfg));
  auto other = cfg;
  other.scheme = skeleton::PartitionScheme::OPPOSITE;
  const auto msg = message_of([&] { load_checkpoint<float>(dir / "m.ckpt", &other); });
  CHECK(kind_of([&] { load_checkpoint<float>(dir / "m.ckpt", &other); }) == ErrorKind::Config);
  CHECK(contains(msg, "differs"));
  fs::remove_all(dir);
}

TEST_CASE("empty config yields the defaults") {
  const auto dir = scratch("config");
  write_file(dir / "c.json", "{}");
  const auto c = load_config(dir / "c.json");
  CHECK(c == RunConfig{});
  CHECK(c.train.margin == 0.02);
  CHECK(c.train.lr_min == 1e-4);
  CHECK(c.train.lr_max == 1e-2);
  CHECK(c.model.stage(1).dim == 32);
  CHECK(c.model.stage(2).dim == 64);
  CHECK(c.model.stage(3).dim == 128);
  CHECK(c.model.stage(4).dim == 256);

  write_file(dir / "r.json", to_json(c).dump());
  CHECK(load_config(dir / "r.json") == c);
  fs::remove_all(dir);
}

TEST_CASE("config schema errors carry key paths") {
  auto err = [](const std::string& text) {
    const auto j = ordered_json::parse(text);
    return message_of([&] { run_config_from_json(j); });
  };
  CHECK(contains(err(R"({"train": {"margin": -1}})"), "train"));
  CHECK(contains(err(R"({"train": {"margin": -1}})"), "margin"));
  CHECK(contains(err(R"({"train": {"margn": 0.1}})"), "train.margn"));
  CHECK(contains(err(R"({"model": {"dims": [8, 16]}})"), "model.dims"));
  CHECK(contains(err(R"({"model": {"scheme": "X"}})"), "model.scheme"));
  CHECK(contains(err(R"({"model": {"stages": [5]}})"), "model.stages"));
  CHECK(contains(err(R"({"synth": {"identities": 0}})"), "synth"));
  CHECK(contains(err(R"({"synth": {"conditions": ["NM", "ZZ"]}})"), "synth.conditions[1]"));
  CHECK(contains(err(R"({"train": {"betas": [0.9]}})"), "train.betas"));
  CHECK(contains(err(R"({"bogus": {}})"), "config.bogus"));
  CHECK(kind_of([] { run_config_from_json(ordered_json::parse(R"({"train": {"epochs": "x"}})")); }) == ErrorKind::Config);

  const auto c = run_config_from_json(ordered_json::parse(
      R"({"model": {"stages": [1, 4], "blocks": 2, "heads": [1, 2, 4, 8], "scheme": "OPPOSITE"},
          "train": {"margin": 0.5, "schedule_unit": "iteration"},
          "synth": {"views": [0, 90, 180], "conditions": ["NM", "CL"]}})"));
  CHECK(c.model.active_stages() == std::vector<int>{1, 4});
  CHECK(c.model.stage(3).blocks == 2);
  CHECK(c.model.stage(4).heads == 8);
  CHECK(c.model.scheme == skeleton::PartitionScheme::OPPOSITE);
  CHECK(c.train.margin == 0.5);
  CHECK(c.train.schedule_unit == training::ScheduleUnit::Iteration);
  CHECK(c.synth.views == std::vector<int>{0, 90, 180});

  const auto dir = scratch("badjson");
  write_file(dir / "b.json", "{ not json");
  CHECK(kind_of([&] { load_config(dir / "b.json"); }) == ErrorKind::Config);
  fs::remove_all(dir);
}

TEST_CASE("readers are total over mutated inputs") {
  const auto dir = scratch("fuzz");
  std::mt19937_64 rng(99);
  std::vector<SequenceRecord> recs{random_record(rng, 2, "001-NM-01-000"), random_record(rng, 1, "002-NM-01-000")};
  write_records(dir / "seq.jsonl", recs);
  write_manifest(dir / "m.json", Manifest{"f", "test", 1, {"seq.jsonl"}, {"001-NM-01-000"}, {"002-NM-01-000"}, {}});
  model::GaitPTModel<float> m(model::tiny_config(), 1);
  save_checkpoint(m, dir / "m.ckpt");
  write_file(dir / "c.json", to_json(RunConfig{}).dump(2));

  const std::vector<std::pair<std::string, std::function<void(const fs::path&)>>> readers{
      {"seq.jsonl", [](const fs::path& p) { read_sequences(p); }},
      {"m.json", [](const fs::path& p) { read_manifest(p); }},
      {"m.ckpt", [](const fs::path& p) { load_checkpoint<float>(p); }},
      {"c.json", [](const fs::path& p) { load_config(p); }},
  };
  const char alphabet[] = "{}[]\",:0123456789.-eE \n";
  for (const auto& [name, read] : readers) {
    const std::string base = read_file(dir / name);
    for (int trial = 0; trial < 150; ++trial) {
      std::string s = base;
      const int edits = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < edits && !s.empty(); ++e) {
        const std::size_t at = rng() % s.size();
        switch (rng() % 4) {
          case 0: s[at] = alphabet[rng() % (sizeof alphabet - 1)]; break;
          case 1: s.erase(at, 1 + rng() % 8); break;
          case 2: s.resize(at); break;
          default: s[at] = static_cast<char>(rng() & 0xff); break;
        }
      }
      const auto p = dir / ("mut_" + name);
      write_file(p, s);
      try {
        read(p);
      } catch (const Error& e) {
        CHECK(std::string(e.what()).size() > 0);
      }
    }
  }
  fs::remove_all(dir);
}
