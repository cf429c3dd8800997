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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "gaitpt/dataio/records.hpp"
#include "gaitpt/error.hpp"
#include "gaitpt/synthgait/synth.hpp"

using namespace gaitpt;
using namespace gaitpt::synthgait;
using skeleton::Condition;
using skeleton::GaitSequence;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gaitpt_synth_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

// Upward zero crossings of a mean-removed signal, with a hysteresis band so
// small ripples do not count twice.
std::vector<double> up_crossings(std::vector<double> s) {
  double mean = 0, amp = 0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  for (double& v : s) {
    v -= mean;
    amp = std::max(amp, std::abs(v));
  }
  const double band = 0.2 * amp;
  std::vector<double> out;
  bool armed = false;
  for (std::size_t t = 1; t < s.size(); ++t) {
    if (s[t] < -band) armed = true;
    if (armed && s[t - 1] < 0 && s[t] >= 0) {
      out.push_back(static_cast<double>(t - 1) + s[t - 1] / (s[t - 1] - s[t]));
      armed = false;
    }
  }
  return out;
}

// Phase of `b` relative to `a`, in radians within [0, 2 pi).
double phase_gap(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ca = up_crossings(a), cb = up_crossings(b);
  REQUIRE(ca.size() >= 3);
  REQUIRE(cb.size() >= 3);
  const double period = (ca.back() - ca.front()) / static_cast<double>(ca.size() - 1);
  double sx = 0, sy = 0;
  for (double tb : cb) {
    double best = 1e300;
    for (double ta : ca) best = std::abs(tb - ta) < std::abs(best) ? tb - ta : best;
    const double ang = 2.0 * std::numbers::pi * best / period;
    sx += std::cos(ang);
    sy += std::sin(ang);
  }
  double g = std::atan2(sy, sx);
  return g < 0 ? g + 2.0 * std::numbers::pi : g;
}

// Per-joint mean and spread of hip-centred coordinates, scaled by torso length.
std::vector<double> trajectory_stats(const GaitSequence& s) {
  std::vector<double> sum(36, 0.0), sq(36, 0.0);
  double torso = 0;
  for (const auto& f : s.frames) {
    const auto& J = f.joints;
    const double hx = 0.5 * (J[11].x + J[12].x), hy = 0.5 * (J[11].y + J[12].y);
    const double sx = 0.5 * (J[5].x + J[6].x), sy = 0.5 * (J[5].y + J[6].y);
    torso += std::hypot(sx - hx, sy - hy);
  }
  torso /= static_cast<double>(s.length());
  for (const auto& f : s.frames) {
    const auto& J = f.joints;
    const double hx = 0.5 * (J[11].x + J[12].x), hy = 0.5 * (J[11].y + J[12].y);
    for (std::size_t k = 0; k < 18; ++k) {
      const double v[2] = {(J[k].x - hx) / torso, (J[k].y - hy) / torso};
      for (int c = 0; c < 2; ++c) {
        sum[2 * k + c] += v[c];
        sq[2 * k + c] += v[c] * v[c];
      }
    }
  }
  const double n = static_cast<double>(s.length());
  std::vector<double> out;
  for (std::size_t i = 0; i < 36; ++i) {
    const double m = sum[i] / n;
    out.push_back(m);
    out.push_back(std::sqrt(std::max(0.0, sq[i] / n - m * m)));
  }
  out.push_back(torso);
  return out;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("sample_identity is deterministic and valid") {
  std::mt19937_64 a(5), b(5);
  CHECK(sample_identity(a) == sample_identity(b));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) CHECK_NOTHROW(sample_identity(rng).validate());
}

TEST_CASE("independent identity draws differ") {
  std::mt19937_64 rng(2024);
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = sample_identity(rng).as_vector();
    const auto y = sample_identity(rng).as_vector();
    if (x == y) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("identity parameter validation") {
  IdentityParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = [](IdentityParams q) {
    try {
      q.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Config;
    }
    return false;
  };
  IdentityParams q = p;
  q.thigh = 0;
  CHECK(bad(q));
  q = p;
  q.frequency = 0.5;
  CHECK(bad(q));
  q = p;
  q.arm_swing = -0.1;
  CHECK(bad(q));
}

TEST_CASE("side view ankles move in antiphase") {
  std::mt19937_64 idr(3);
  for (int trial = 0; trial < 10; ++trial) {
    IdentityParams id = sample_identity(idr);
    id.noise = 0;
    std::mt19937_64 rng(100 + trial);
    // A wide frame keeps the walker clear of the borders for the whole clip.
    const auto seq = generate_pixel_sequence(id, 90, Condition::NM, 400, rng, 40000.0, 480.0);
    std::vector<double> left, right;
    for (const auto& f : seq.frames) {
      const double hip = 0.5 * (f.joints[11].x + f.joints[12].x);
      left.push_back(f.joints[15].x - hip);
      right.push_back(f.joints[16].x - hip);
    }
    const double gap = phase_gap(left, right);
    CHECK(std::abs(gap - std::numbers::pi) <= 0.1);
  }
}

TEST_CASE("single-frame and normalized output") {
  std::mt19937_64 idr(8);
  const IdentityParams id = sample_identity(idr);
  std::mt19937_64 rng(1);
  const auto one = generate_sequence(id, 36, Condition::BG, 1, rng);
  REQUIRE(one.length() == 1);
  CHECK(one.frames[0].joints[17] == one.frames[0].joints[0]);

  for (int view : {0, 18, 90, 144, 180}) {
    for (auto cond : {Condition::NM, Condition::BG, Condition::CL}) {
      IdentityParams noisy = id;
      noisy.noise = 0.01;
      std::mt19937_64 r(view * 7 + static_cast<int>(cond));
      const auto s = generate_sequence(noisy, view, cond, 120, r);
      for (const auto& f : s.frames)
        for (const auto& p : f.joints) {
          CHECK(p.x >= 0.0);
          CHECK(p.x <= 1.0);
          CHECK(p.y >= 0.0);
          CHECK(p.y <= 1.0);
        }
    }
  }
}

TEST_CASE("same inputs give the same sequence") {
  std::mt19937_64 idr(4);
  const IdentityParams id = sample_identity(idr);
  std::mt19937_64 r1(77), r2(77);
  const auto a = generate_sequence(id, 54, Condition::CL, 30, r1);
  const auto b = generate_sequence(id, 54, Condition::CL, 30, r2);
  REQUIRE(a.length() == b.length());
  for (std::size_t t = 0; t < a.length(); ++t) CHECK(a.frames[t] == b.frames[t]);
}

TEST_CASE("identities are separable from trajectory statistics") {
  constexpr int ids = 20, seqs = 8, fit = 4;
  std::mt19937_64 idr(2025);
  std::vector<std::vector<std::vector<double>>> feats(ids);
  for (int i = 0; i < ids; ++i) {
    IdentityParams id = sample_identity(idr);
    id.noise = 0;
    for (int s = 0; s < seqs; ++s) {
      std::mt19937_64 rng(1000 * i + s);
      feats[i].push_back(trajectory_stats(generate_sequence(id, 90, Condition::NM, 60, rng)));
    }
  }
  std::vector<std::vector<double>> centroid(ids, std::vector<double>(feats[0][0].size(), 0.0));
  for (int i = 0; i < ids; ++i)
    for (int s = 0; s < fit; ++s)
      for (std::size_t k = 0; k < centroid[i].size(); ++k) centroid[i][k] += feats[i][s][k] / fit;

  int correct = 0, total = 0;
  double intra = 0;
  for (int i = 0; i < ids; ++i)
    for (int s = fit; s < seqs; ++s) {
      int best = 0;
      for (int c = 1; c < ids; ++c)
        if (dist(feats[i][s], centroid[c]) < dist(feats[i][s], centroid[best])) best = c;
      correct += best == i;
      ++total;
      intra += dist(feats[i][s], centroid[i]);
    }
  intra /= total;
  double inter = 0;
  int pairs = 0;
  for (int a = 0; a < ids; ++a)
    for (int b = a + 1; b < ids; ++b, ++pairs) inter += dist(centroid[a], centroid[b]);
  inter /= pairs;

  CHECK(static_cast<double>(correct) / total >= 0.95);
  CHECK(inter >= 3.0 * intra);
}

TEST_CASE("synth config validation") {
  SynthConfig c;
  CHECK_NOTHROW(c.validate());
  auto config_error = [](SynthConfig x) {
    try {
      x.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Config;
    }
    return false;
  };
  SynthConfig d = c;
  d.identities = 0;
  CHECK(config_error(d));
  d = c;
  d.frames = 0;
  CHECK(config_error(d));
  d = c;
  d.views.clear();
  CHECK(config_error(d));
  d = c;
  d.train_per_view = d.sequences_per_identity;
  CHECK(config_error(d));
}

TEST_CASE("build_dataset layout and determinism") {
  SynthConfig cfg;
  cfg.frames = 40;
  const auto dir_a = scratch("a"), dir_b = scratch("b");
  const auto manifest = build_dataset(cfg, dir_a);
  build_dataset(cfg, dir_b);

  const auto m = dataio::read_manifest(manifest);
  CHECK(m.train.size() + m.gallery.size() + m.probe.size() == 64);
  CHECK(m.gallery.size() == 16);
  std::set<std::string> keys;
  for (const auto* split : {&m.train, &m.gallery, &m.probe})
    for (const auto& k : *split) CHECK(keys.insert(k).second);
  CHECK(keys.size() == 64);

  const auto seqs = dataio::read_sequences(dir_a / "sequences.jsonl");
  CHECK(seqs.size() == 64);
  for (const auto& s : seqs) {
    if (std::find(m.gallery.begin(), m.gallery.end(), s.key) != m.gallery.end()) {
      CHECK(s.condition == Condition::NM);
      CHECK(s.session == 1);
    }
  }

  for (const char* f : {"sequences.jsonl", "manifest.json"})
    CHECK(dataio::read_file(dir_a / f) == dataio::read_file(dir_b / f));

  SynthConfig other = cfg;
  other.seed = 1;
  const auto dir_c = scratch("c");
  build_dataset(other, dir_c);
  CHECK(dataio::read_file(dir_a / "sequences.jsonl") != dataio::read_file(dir_c / "sequences.jsonl"));

  const auto split = make_split_dataset(cfg);
  CHECK(split.train.size() == m.train.size());
  CHECK(split.gallery.size() == m.gallery.size());
  CHECK(split.probe.size() == m.probe.size());
  for (auto d : {dir_a, dir_b, dir_c}) std::filesystem::remove_all(d);
}

TEST_CASE("condition mix and session numbering") {
  SynthConfig cfg;
  cfg.identities = 2;
  cfg.sequences_per_identity = 7;
  cfg.views = {0, 90, 180};
  cfg.conditions = {Condition::NM, Condition::BG, Condition::CL};
  cfg.train_per_view = 3;
  cfg.frames = 5;
  const auto data = generate_dataset(cfg);
  CHECK(data.size() == 2 * 7 * 3);
  std::set<std::string> keys;
  for (const auto& g : data) CHECK(keys.insert(g.pixels.key).second);
  CHECK(keys.contains("001-NM-01-090"));
  CHECK(keys.contains("002-CL-02-180"));
  CHECK(keys.contains("001-NM-03-000"));
  CHECK(data[0].split == Split::Gallery);
  CHECK(data[1].split == Split::Train);
  CHECK(data[4].split == Split::Probe);
}

TEST_CASE("unwritable output surfaces the path") {
  SynthConfig cfg;
  cfg.identities = 1;
  cfg.frames = 2;
  const auto blocker = std::filesystem::temp_directory_path() / "gaitpt_synth_blocker";
  dataio::write_file(blocker, "x");
  try {
    build_dataset(cfg, blocker / "sub");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(std::string(e.what()).find("gaitpt_synth_blocker") != std::string::npos);
  }
  std::filesystem::remove(blocker);
}
