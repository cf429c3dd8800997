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

#include "gaitpt/dataio/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gaitpt/dataio/config.hpp"
#include "gaitpt/dataio/records.hpp"
#include "gaitpt/error.hpp"

namespace gaitpt::dataio {

using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

template <typename T>
constexpr const char* dtype_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(const char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

template <typename T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct RawCheckpoint {
  CheckpointHeader header;
  std::string payload;
};

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& what) {
  fail(ErrorKind::Integrity, path.string() + ": " + what);
}

CheckpointHeader parse_header(const std::string& text, const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    corrupt(path, "header is not valid JSON");
  }
  CheckpointHeader h;
  try {
    if (j.at("format").get<std::string>() != "gaitpt-checkpoint") corrupt(path, "unexpected header format");
    h.version = j.at("version").get<int>();
    if (h.version != kCheckpointVersion)
      fail(ErrorKind::Format, path.string() + ": unsupported checkpoint version " + std::to_string(h.version));
    h.dtype = j.at("dtype").get<std::string>();
    if (h.dtype != "f32" && h.dtype != "f64") corrupt(path, "unknown dtype " + h.dtype);
    h.config = model_config_from_json(j.at("config"), "config");
    for (const auto& p : j.at("params")) h.params.emplace_back(p.at("name").get<std::string>(), p.at("shape").get<num::Shape>());
    h.payload_bytes = j.at("payload_bytes").get<std::uint64_t>();
    const auto sum = j.at("checksum").get<std::string>();
    std::size_t used = 0;
    h.checksum = std::stoull(sum, &used, 16);
    if (used != sum.size()) corrupt(path, "malformed checksum");
    if (j.contains("extra")) h.extra = j.at("extra");
  } catch (const nlohmann::json::exception&) {
    corrupt(path, "header is missing fields or has wrong types");
  } catch (const std::logic_error&) {
    corrupt(path, "malformed checksum");
  }
  return h;
}

RawCheckpoint read_raw(const std::filesystem::path& path, bool with_payload) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 16 || std::string_view(bytes).substr(0, 8) != kCheckpointMagic)
    fail(ErrorKind::Format, path.string() + ": not a checkpoint file");
  const auto header_len = get_le<std::uint64_t>(bytes.data() + 8);
  if (header_len > bytes.size() - 16)
    corrupt(path, "truncated header: expected " + std::to_string(header_len) + " bytes, found " +
                      std::to_string(bytes.size() - 16));
  RawCheckpoint raw;
  raw.header = parse_header(bytes.substr(16, header_len), path);
  const std::size_t start = 16 + header_len;
  const std::size_t have = bytes.size() - start;
  if (have != raw.header.payload_bytes)
    corrupt(path, "truncated payload: expected " + std::to_string(raw.header.payload_bytes) + " bytes, found " +
                      std::to_string(have));
  if (with_payload) {
    raw.payload = bytes.substr(start);
    if (fnv1a64(raw.payload) != raw.header.checksum)
      corrupt(path, "checksum mismatch: expected " + hex64(raw.header.checksum) + ", computed " +
                        hex64(fnv1a64(raw.payload)));
  }
  return raw;
}

}  // namespace

template <typename T>
void save_checkpoint(const model::GaitPTModel<T>& model, const std::filesystem::path& path, const ordered_json& extra) {
  std::string payload;
  ordered_json params = ordered_json::array();
  for (const auto& p : model.parameters().all()) {
    params.push_back({{"name", p.name}, {"shape", p.var.shape()}});
    for (T v : p.var.value().data()) put_le(payload, std::bit_cast<Bits<T>>(v));
  }
  ordered_json h;
  h["format"] = "gaitpt-checkpoint";
  h["version"] = kCheckpointVersion;
  h["dtype"] = dtype_name<T>();
  h["config"] = to_json(model.config());
  h["params"] = std::move(params);
  h["payload_bytes"] = payload.size();
  h["checksum"] = hex64(fnv1a64(payload));
  h["extra"] = extra;
  const std::string header = h.dump();

  std::string out(kCheckpointMagic);
  put_le<std::uint64_t>(out, header.size());
  out += header;
  out += payload;
  write_file(path, out);
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  return read_raw(path, false).header;
}

template <typename T>
model::GaitPTModel<T> load_checkpoint(const std::filesystem::path& path, const model::GaitPTConfig* expected) {
  RawCheckpoint raw = read_raw(path, true);
  const auto& h = raw.header;
  if (h.dtype != dtype_name<T>())
    fail(ErrorKind::Config, path.string() + ": checkpoint holds " + h.dtype + " parameters, requested " + dtype_name<T>());
  if (expected && !(*expected == h.config))
    fail(ErrorKind::Config, path.string() + ": checkpoint config differs from the requested model config");

  model::GaitPTModel<T> m(h.config, 0);
  auto& params = m.parameters().all();
  if (params.size() != h.params.size())
    corrupt(path, "parameter count " + std::to_string(h.params.size()) + " does not match the model (" +
                      std::to_string(params.size()) + ")");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (p.name != h.params[i].first || p.var.shape() != h.params[i].second)
      corrupt(path, "parameter " + h.params[i].first + " does not match the model layout");
    auto dst = p.var.mutable_value().data();
    if (offset + dst.size() * sizeof(T) > raw.payload.size()) corrupt(path, "payload shorter than parameter table");
    for (auto& v : dst) {
      v = std::bit_cast<T>(get_le<Bits<T>>(raw.payload.data() + offset));
      offset += sizeof(T);
    }
  }
  if (offset != raw.payload.size()) corrupt(path, "payload longer than parameter table");
  return m;
}

template void save_checkpoint<float>(const model::GaitPTModel<float>&, const std::filesystem::path&, const ordered_json&);
template void save_checkpoint<double>(const model::GaitPTModel<double>&, const std::filesystem::path&, const ordered_json&);
template model::GaitPTModel<float> load_checkpoint<float>(const std::filesystem::path&, const model::GaitPTConfig*);
template model::GaitPTModel<double> load_checkpoint<double>(const std::filesystem::path&, const model::GaitPTConfig*);

}  // namespace gaitpt::dataio
