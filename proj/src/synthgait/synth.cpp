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

#include "gaitpt/synthgait/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

#include "gaitpt/dataio/records.hpp"
#include "gaitpt/error.hpp"
#include "gaitpt/skeleton/preprocess.hpp"

namespace gaitpt::synthgait {

using skeleton::Condition;
using skeleton::GaitSequence;
using skeleton::Point;

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gauss(std::mt19937_64& rng, double sd) {
  return sd > 0.0 ? std::normal_distribution<double>(0.0, sd)(rng) : 0.0;
}

// Body-frame point: s along the walking direction, l lateral, y up.
struct P3 {
  double s, l, y;
};

}  // namespace

void IdentityParams::validate() const {
  const double lengths[] = {head, neck, torso, shoulder_half, hip_half, upper_arm, forearm, thigh, shin};
  for (double v : lengths) check(v > 0.0, ErrorKind::Config, "identity limb lengths must be positive");
  check(frequency > 0.0 && frequency < 0.5, ErrorKind::Config, "stride frequency must lie in (0, 0.5)");
  const double amps[] = {leg_swing, knee_flex, arm_swing, elbow_flex, bob};
  for (double v : amps) check(v >= 0.0, ErrorKind::Config, "swing amplitudes must be non-negative");
  check(noise >= 0.0, ErrorKind::Config, "noise must be non-negative");
}

std::vector<double> IdentityParams::as_vector() const {
  std::vector<double> v{head,      neck,      torso,      shoulder_half, hip_half, upper_arm,
                        forearm,   thigh,     shin,       frequency,     leg_swing, knee_flex,
                        arm_swing, elbow_flex, bob,       lean};
  v.insert(v.end(), phase.begin(), phase.end());
  v.push_back(noise);
  return v;
}

void SynthConfig::validate() const {
  check(identities >= 1, ErrorKind::Config, "synth.identities must be at least 1");
  check(sequences_per_identity >= 1, ErrorKind::Config, "synth.sequences_per_identity must be at least 1");
  check(frames >= 1, ErrorKind::Config, "synth.frames must be at least 1");
  check(!views.empty(), ErrorKind::Config, "synth.views must be nonempty");
  check(!conditions.empty(), ErrorKind::Config, "synth.conditions must be nonempty");
  for (auto c : conditions)
    check(c != Condition::OTHER, ErrorKind::Config, "synth.conditions accepts NM, BG and CL only");
  check(train_per_view < sequences_per_identity, ErrorKind::Config,
        "synth.train_per_view must be below sequences_per_identity (sequence 0 is the gallery)");
  check(noise >= 0.0, ErrorKind::Config, "synth.noise must be non-negative");
  check(frame_width > 0.0 && frame_height > 0.0, ErrorKind::Config, "synth frame size must be positive");
}

IdentityParams sample_identity(std::mt19937_64& rng) {
  IdentityParams p;
  p.head = uniform(rng, 0.025, 0.040);
  p.neck = uniform(rng, 0.06, 0.10);
  p.torso = uniform(rng, 0.26, 0.34);
  p.shoulder_half = uniform(rng, 0.08, 0.13);
  p.hip_half = uniform(rng, 0.05, 0.09);
  p.upper_arm = uniform(rng, 0.15, 0.20);
  p.forearm = uniform(rng, 0.13, 0.18);
  p.thigh = uniform(rng, 0.22, 0.28);
  p.shin = uniform(rng, 0.22, 0.28);
  p.frequency = uniform(rng, 0.025, 0.045);
  p.leg_swing = uniform(rng, 0.25, 0.50);
  p.knee_flex = uniform(rng, 0.30, 0.70);
  p.arm_swing = uniform(rng, 0.15, 0.60);
  p.elbow_flex = uniform(rng, 0.10, 0.40);
  p.bob = uniform(rng, 0.005, 0.020);
  p.lean = uniform(rng, -0.08, 0.08);
  p.phase[0] = uniform(rng, -0.3, 0.3);
  p.phase[1] = uniform(rng, -0.3, 0.3);
  p.phase[2] = uniform(rng, -0.3, 0.3);
  p.phase[3] = uniform(rng, -0.05, 0.05);
  p.phase[4] = uniform(rng, -0.05, 0.05);
  return p;
}

GaitSequence generate_pixel_sequence(const IdentityParams& id, int view, Condition condition,
                                     std::size_t frames, std::mt19937_64& rng, double frame_width,
                                     double frame_height) {
  id.validate();
  check(frames >= 1, ErrorKind::Config, "frames must be at least 1");

  // Per-sequence nuisance: start phase and cadence; the camera framing is fixed.
  const double phase0 = uniform(rng, 0.0, 2.0 * kPi);
  const double freq = std::clamp(id.frequency * (1.0 + gauss(rng, 0.02)), 1e-3, 0.49);
  const double unit = 0.55 * frame_height;
  const double cx = 0.5 * frame_width;
  const double ground = 0.95 * frame_height;

  IdentityParams b = id;
  if (condition == Condition::CL) {
    for (double* len : {&b.neck, &b.torso, &b.shoulder_half, &b.hip_half, &b.upper_arm, &b.forearm,
                        &b.thigh, &b.shin})
      *len *= 1.0 + gauss(rng, 0.04);
  }
  const double left_arm_swing = condition == Condition::BG ? 0.25 * b.arm_swing : b.arm_swing;

  const double leg = b.thigh + b.shin;
  const double speed = 2.0 * leg * std::sin(b.leg_swing) * freq;  // half of the true stride speed
  const double centre = 0.5 * static_cast<double>(frames - 1);
  const double theta = static_cast<double>(view) * kPi / 180.0;
  const double sv = std::sin(theta), cv = std::cos(theta);

  GaitSequence seq;
  seq.view = view;
  seq.condition = condition;
  seq.frames.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const double phi = phase0 + 2.0 * kPi * freq * static_cast<double>(t);
    const double hs = speed * (static_cast<double>(t) - centre);
    const double hy = leg - b.bob * (0.5 - 0.5 * std::cos(2.0 * phi));
    std::array<P3, skeleton::kRawJoints> j{};

    auto leg_chain = [&](double side, double ph, std::size_t hip, std::size_t knee, std::size_t ankle) {
      const double th = b.leg_swing * std::sin(ph);
      const double k = b.knee_flex * (0.5 + 0.5 * std::sin(ph - 0.5 * kPi));
      j[hip] = {hs, side * b.hip_half, hy};
      j[knee] = {hs + b.thigh * std::sin(th), side * b.hip_half, hy - b.thigh * std::cos(th)};
      j[ankle] = {j[knee].s + b.shin * std::sin(th - k), side * b.hip_half,
                  j[knee].y - b.shin * std::cos(th - k)};
    };
    leg_chain(1.0, phi + b.phase[3], 11, 13, 15);
    leg_chain(-1.0, phi + kPi + b.phase[4], 12, 14, 16);

    const double ss = hs + b.torso * std::sin(b.lean);
    const double sy = hy + b.torso * std::cos(b.lean);
    auto arm_chain = [&](double side, double amp, double ph, std::size_t sh, std::size_t el, std::size_t wr) {
      const double a = amp * std::sin(ph);
      const double e = b.elbow_flex * (0.5 + 0.5 * std::sin(ph));
      j[sh] = {ss, side * b.shoulder_half, sy};
      j[el] = {ss + b.upper_arm * std::sin(a), side * b.shoulder_half, sy - b.upper_arm * std::cos(a)};
      j[wr] = {j[el].s + b.forearm * std::sin(a + e), side * b.shoulder_half,
               j[el].y - b.forearm * std::cos(a + e)};
    };
    arm_chain(1.0, left_arm_swing, phi + kPi + b.phase[1], 5, 7, 9);
    arm_chain(-1.0, b.arm_swing, phi + b.phase[2], 6, 8, 10);

    const double nod = 0.3 * b.bob * std::sin(2.0 * phi + b.phase[0]);
    const double ts = ss + b.neck * std::sin(b.lean);
    const double ty = sy + b.neck * std::cos(b.lean) + nod;
    j[0] = {ts + 2.0 * b.head, 0.0, ty + b.head};
    j[1] = {ts + 1.5 * b.head, b.head, ty + 1.5 * b.head};
    j[2] = {ts + 1.5 * b.head, -b.head, ty + 1.5 * b.head};
    j[3] = {ts, 1.8 * b.head, ty + 1.2 * b.head};
    j[4] = {ts, -1.8 * b.head, ty + 1.2 * b.head};

    std::array<Point, skeleton::kRawJoints> raw{};
    for (std::size_t k = 0; k < raw.size(); ++k) {
      const double u = j[k].s * sv + j[k].l * cv;
      const double x = cx + unit * u + gauss(rng, id.noise * frame_width);
      const double y = ground - unit * j[k].y + gauss(rng, id.noise * frame_width);
      raw[k] = {std::clamp(x, 0.0, frame_width), std::clamp(y, 0.0, frame_height)};
    }
    seq.frames.push_back(skeleton::duplicate_nose(raw));
  }
  return seq;
}

GaitSequence generate_sequence(const IdentityParams& id, int view, Condition condition,
                               std::size_t frames, std::mt19937_64& rng, double frame_width,
                               double frame_height) {
  return skeleton::normalize_sequence(
      generate_pixel_sequence(id, view, condition, frames, rng, frame_width, frame_height), frame_width);
}

std::vector<GeneratedSequence> generate_dataset(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<GeneratedSequence> out;
  for (std::size_t i = 0; i < cfg.identities; ++i) {
    std::mt19937_64 id_rng(stream_seed(cfg.seed, 1, i));
    IdentityParams id = sample_identity(id_rng);
    id.noise = cfg.noise;
    char subject[16];
    std::snprintf(subject, sizeof subject, "%03zu", i + 1);
    for (std::size_t v = 0; v < cfg.views.size(); ++v) {
      std::map<Condition, int> sessions;
      for (std::size_t s = 0; s < cfg.sequences_per_identity; ++s) {
        const Condition cond = s == 0 ? Condition::NM : cfg.conditions[(s - 1) % cfg.conditions.size()];
        std::mt19937_64 rng(stream_seed(cfg.seed, 2, i, v * 100003 + s));
        GeneratedSequence g;
        g.pixels = generate_pixel_sequence(id, cfg.views[v], cond, cfg.frames, rng, cfg.frame_width,
                                           cfg.frame_height);
        g.pixels.subject_id = subject;
        g.pixels.session = ++sessions[cond];
        char key[64];
        std::snprintf(key, sizeof key, "%s-%s-%02d-%03d", subject,
                      std::string(skeleton::to_string(cond)).c_str(), g.pixels.session, cfg.views[v]);
        g.pixels.key = key;
        g.split = s == 0 ? Split::Gallery : (s <= cfg.train_per_view ? Split::Train : Split::Probe);
        out.push_back(std::move(g));
      }
    }
  }
  return out;
}

skeleton::SplitDataset make_split_dataset(const SynthConfig& cfg) {
  skeleton::SplitDataset d;
  for (auto& g : generate_dataset(cfg)) {
    auto seq = skeleton::normalize_sequence(g.pixels, cfg.frame_width);
    (g.split == Split::Train ? d.train : g.split == Split::Gallery ? d.gallery : d.probe)
        .push_back(std::move(seq));
  }
  return d;
}

std::filesystem::path build_dataset(const SynthConfig& cfg, const std::filesystem::path& dir) {
  const auto generated = generate_dataset(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());

  std::vector<dataio::SequenceRecord> records;
  dataio::Manifest m;
  m.name = "synthgait";
  m.generator = "synthgait";
  m.seed = cfg.seed;
  m.files = {"sequences.jsonl"};
  for (const auto& g : generated) {
    records.push_back({g.pixels, cfg.frame_width});
    (g.split == Split::Train ? m.train : g.split == Split::Gallery ? m.gallery : m.probe).push_back(g.pixels.key);
  }
  dataio::write_records(dir / "sequences.jsonl", records);
  const auto manifest = dir / "manifest.json";
  dataio::write_manifest(manifest, m);
  return manifest;
}

}  // namespace gaitpt::synthgait
