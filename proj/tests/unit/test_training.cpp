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
#include <random>

#include "gaitpt/error.hpp"
#include "gaitpt/numcore/gradcheck.hpp"
#include "gaitpt/training/loss.hpp"
#include "gaitpt/training/trainer.hpp"

using namespace gaitpt;
using namespace gaitpt::training;
using num::Shape;
using num::Tensor;
using num::Var;

namespace {

// Brute-force batch-hard reference using long double distances.
std::vector<Triplet> mine_oracle(const std::vector<std::vector<double>>& e,
                                 const std::vector<std::string>& labels) {
  auto dist = [&](std::size_t i, std::size_t j) {
    long double s = 0;
    for (std::size_t k = 0; k < e[i].size(); ++k) {
      const long double d = static_cast<long double>(e[i][k]) - e[j][k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::vector<Triplet> out;
  for (std::size_t a = 0; a < e.size(); ++a) {
    long double best_p = -1, best_n = INFINITY;
    std::size_t p = 0, n = 0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (j == a) continue;
      const long double d = dist(a, j);
      if (labels[j] == labels[a] && d > best_p) {
        best_p = d;
        p = j;
      }
      if (labels[j] != labels[a] && d < best_n) {
        best_n = d;
        n = j;
      }
    }
    out.push_back({a, p, n});
  }
  return out;
}

// Identity-specific sinusoidal walkers with per-sequence noise.
std::vector<skeleton::GaitSequence> toy_dataset(std::size_t ids, std::size_t per_id,
                                                std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<skeleton::GaitSequence> out;
  for (std::size_t id = 0; id < ids; ++id) {
    std::vector<double> amp(skeleton::kJoints), base(skeleton::kJoints * 2);
    for (auto& a : amp) a = 0.02 + 0.1 * u(rng);
    for (auto& b : base) b = 0.2 + 0.6 * u(rng);
    const double freq = 0.2 + 0.1 * static_cast<double>(id);
    for (std::size_t s = 0; s < per_id; ++s) {
      skeleton::GaitSequence seq;
      seq.subject_id = "id" + std::to_string(id);
      seq.key = seq.subject_id + "-" + std::to_string(s);
      const double phase = 6.28 * u(rng);
      for (std::size_t f = 0; f < frames; ++f) {
        skeleton::Pose p;
        for (std::size_t j = 0; j < skeleton::kJoints; ++j) {
          const double w = std::sin(freq * static_cast<double>(f) + phase + 0.3 * static_cast<double>(j));
          p.joints[j] = {base[2 * j] + amp[j] * w + noise(rng), base[2 * j + 1] + noise(rng)};
        }
        seq.frames.push_back(p);
      }
      out.push_back(std::move(seq));
    }
  }
  return out;
}

model::GaitPTConfig toy_model_config() {
  auto c = model::tiny_config();
  c.sequence_length = 6;
  return c;
}

TrainConfig toy_train_config() {
  TrainConfig t;
  t.identities_per_batch = 4;
  t.samples_per_identity = 2;
  t.epochs = 1;
  t.batches_per_epoch = 12;
  t.schedule_unit = ScheduleUnit::Iteration;
  t.lr_min = 1e-3;
  t.lr_max = 5e-3;
  t.step_size = 6;
  t.seed = 5;
  t.margin = 0.3;
  return t;
}

}  // namespace

TEST_CASE("triplet loss point values") {
  CHECK(std::abs(triplet_loss(0.5, 0.1, 0.02) - 0.42) < 1e-15);
  CHECK(triplet_loss(0.1, 0.5, 0.02) == 0.0);
  CHECK(triplet_loss(0.1, 0.5, 0.02, false) == doctest::Approx(-0.38));
  std::vector<double> a{0.3, -0.2, 0.9};
  CHECK(triplet_loss(a, a, a, 0.02) == 0.02);
  std::vector<double> shorter{1.0};
  try {
    triplet_loss(a, a, shorter, 0.02);
    FAIL("expected an input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Input);
  }
}

TEST_CASE("triplet loss is non-negative and zero exactly past the margin") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double dp = u(rng), dn = u(rng), m = 0.02 * u(rng) + 1e-3;
    const double l = triplet_loss(dp, dn, m);
    CHECK(l >= 0.0);
    CHECK((l == 0.0) == (dn >= dp + m));
  }
}

TEST_CASE("tensor triplet loss agrees with the scalar form and differentiates") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Tensor<double> e({6, 4});
  for (auto& v : e.data()) v = g(rng);
  std::vector<Triplet> ts{{0, 1, 2}, {3, 4, 5}, {2, 0, 5}, {1, 4, 3}};
  std::vector<std::vector<double>> rows(6);
  for (std::size_t i = 0; i < 6; ++i) rows[i].assign(e.ptr() + 4 * i, e.ptr() + 4 * i + 4);
  for (double m : {0.02, 1.0, 3.0}) {
    double expect = 0.0;
    std::size_t expect_active = 0;
    for (const auto& t : ts) {
      expect += triplet_loss(rows[t.anchor], rows[t.positive], rows[t.negative], m);
      expect_active += triplet_loss(rows[t.anchor], rows[t.positive], rows[t.negative], m) > 0;
    }
    std::size_t active = 0;
    auto l = triplet_loss(num::constant(e), std::span<const Triplet>(ts), m, true, &active);
    CHECK(l.value().item() == doctest::Approx(expect / 4).epsilon(1e-9));
    CHECK(active == expect_active);
  }
  auto r = num::grad_check(
      [&](const Var<double>& x) { return triplet_loss(x, std::span<const Triplet>(ts), 1.0, true); },
      e, 1e-6, 1e-6);
  CHECK(r.pass);
}

TEST_CASE("batch-hard mining matches exhaustive search") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t labels_n = 2 + rng() % 4;
    std::vector<std::string> labels;
    for (std::size_t l = 0; l < labels_n; ++l)
      for (std::size_t k = 0; k < 2 + rng() % 2; ++k) labels.push_back("L" + std::to_string(l));
    if (labels.size() > 16) labels.resize(16);
    std::shuffle(labels.begin(), labels.end(), rng);
    std::map<std::string, int> counts;
    for (auto& l : labels) ++counts[l];
    bool ok = counts.size() >= 2;
    for (auto& [l, c] : counts) ok = ok && c >= 2;
    if (!ok) continue;
    std::vector<std::vector<double>> e(labels.size(), std::vector<double>(3));
    const bool grid = trial % 2 == 0;  // integer grid forces distance ties
    for (auto& row : e)
      for (auto& v : row) v = grid ? static_cast<double>(rng() % 3) : std::normal_distribution<double>()(rng);
    const auto mined = batch_hard_mine(e, labels);
    CHECK(mined == mine_oracle(e, labels));
    for (const auto& t : mined) {
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (labels[j] != labels[t.anchor]) CHECK(euclidean(e[t.anchor], e[t.negative]) <= euclidean(e[t.anchor], e[j]));
      }
    }
  }
}

TEST_CASE("batch-hard mining preconditions") {
  std::vector<std::vector<double>> e(3, std::vector<double>{0.0});
  std::vector<std::string> lonely{"a", "a", "b"};
  try {
    batch_hard_mine(e, lonely);
    FAIL("expected a sampling error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Sampling);
    CHECK(std::string(err.what()).find("'b'") != std::string::npos);
  }
  std::vector<std::string> single{"a", "a", "a"};
  CHECK_THROWS_AS(batch_hard_mine(e, single), Error);

  std::vector<std::vector<double>> same(4, std::vector<double>{0.5, 0.5});
  std::vector<std::string> two{"a", "a", "b", "b"};
  for (const auto& t : batch_hard_mine(same, two))
    CHECK(triplet_loss(same[t.anchor], same[t.positive], same[t.negative], 0.02) == 0.02);
}

TEST_CASE("adamw closed forms") {
  num::ParameterStore<double> ps;
  auto w = ps.add("w", Tensor<double>({3}, {1.0, -2.0, 0.5}));
  const auto before = w.value();

  auto state = OptimizerState<double>::zeros_like(ps);
  AdamWSettings s;
  s.weight_decay = 0.0;
  adamw_step(ps, state, 0.1, s);
  CHECK(w.value() == before);

  s.weight_decay = 0.01;
  adamw_step(ps, state, 0.1, s);
  for (std::size_t i = 0; i < 3; ++i) CHECK(w.value()[i] == doctest::Approx(before[i] * (1 - 0.1 * 0.01)).epsilon(1e-14));

  num::ParameterStore<double> ps2;
  auto x = ps2.add("x", Tensor<double>({2}, {0.0, 0.0}));
  auto st2 = OptimizerState<double>::zeros_like(ps2);
  {
    num::Tape<double> tape;
    num::TapeScope<double> scope(tape);
    auto loss = num::sum(num::mul(x, num::constant(Tensor<double>({2}, {3.0, -0.25}))));
    tape.backward(loss);
  }
  AdamWSettings plain;
  plain.weight_decay = 0.0;
  adamw_step(ps2, st2, 0.01, plain);
  CHECK(x.value()[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(x.value()[1] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(st2.step == 1);
}

TEST_CASE("adamw matches a long-double reference and descends a quadratic") {
  num::ParameterStore<double> ps;
  auto x = ps.add("x", Tensor<double>({4}, {2.0, -1.0, 0.5, 3.0}));
  auto st = OptimizerState<double>::zeros_like(ps);
  AdamWSettings s{0.9, 0.999, 1e-8, 1e-3};
  std::vector<long double> th{2.0L, -1.0L, 0.5L, 3.0L}, m(4, 0), v(4, 0);
  const std::vector<double> scale{1.0, 4.0, 0.5, 2.0};
  auto objective = [&] {
    double f = 0.0;
    for (std::size_t i = 0; i < 4; ++i) f += scale[i] * x.value()[i] * x.value()[i];
    return f;
  };
  double prev = objective();
  for (int step = 1; step <= 50; ++step) {
    ps.zero_grad();
    {
      num::Tape<double> tape;
      num::TapeScope<double> scope(tape);
      auto sc = num::constant(Tensor<double>({4}, std::vector<double>(scale)));
      tape.backward(num::sum(num::mul(sc, num::mul(x, x))));
    }
    for (std::size_t i = 0; i < 4; ++i) {
      const long double g = 2.0L * scale[i] * th[i];
      m[i] = 0.9L * m[i] + 0.1L * g;
      v[i] = 0.999L * v[i] + 0.001L * g * g;
      const long double mh = m[i] / (1 - std::pow(0.9L, step));
      const long double vh = v[i] / (1 - std::pow(0.999L, step));
      th[i] = th[i] - 0.01L * mh / (std::sqrt(vh) + 1e-8L) - 0.01L * 1e-3L * th[i];
    }
    adamw_step(ps, st, 0.01, s);
    const double f = objective();
    CHECK(f < prev);
    prev = f;
  }
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(x.value()[i] - static_cast<double>(th[i])) < 1e-9);
}

TEST_CASE("cyclic learning rate") {
  TrainConfig c;
  CHECK(cyclic_lr(0, c) == 1e-4);
  CHECK(cyclic_lr(15, c) == doctest::Approx(1e-4 + 0.0099 * std::pow(0.995, 15)).epsilon(1e-14));
  CHECK(cyclic_lr(30, c) == doctest::Approx(1e-4).epsilon(1e-14));
  CHECK(cyclic_lr(45, c) == doctest::Approx(1e-4 + 0.0099 * std::pow(0.995, 45)).epsilon(1e-14));
  CHECK(cyclic_lr(7, c) == doctest::Approx(1e-4 + 0.0099 * (7.0 / 15.0) * std::pow(0.995, 7)).epsilon(1e-12));
  for (std::size_t it = 0; it < 20000; ++it) {
    const double lr = cyclic_lr(it, c);
    CHECK(lr >= c.lr_min);
    CHECK(lr <= c.lr_max);
  }
  CHECK(cyclic_lr(100015, c) - c.lr_min < 1e-12);

  TrainConfig bad = c;
  bad.lr_min = 0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.step_size = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.margin = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("zero margin on identical embeddings leaves parameters untouched") {
  model::GaitPTModel<double> m(toy_model_config(), 3);
  auto data = toy_dataset(1, 1, 6, 1);
  std::vector<skeleton::GaitSequence> windows(4, data[0]);
  std::vector<std::string> labels{"a", "a", "b", "b"};
  std::vector<Tensor<double>> before;
  for (const auto& p : m.parameters().all()) before.push_back(p.var.value());
  {
    num::Tape<double> tape;
    num::TapeScope<double> scope(tape);
    auto emb = m.forward_batch(num::constant(model::stack_windows<double>(windows)));
    std::vector<std::vector<double>> rows(4);
    for (std::size_t i = 0; i < 4; ++i)
      rows[i].assign(emb.value().ptr() + 16 * i, emb.value().ptr() + 16 * (i + 1));
    auto ts = batch_hard_mine(rows, labels);
    auto loss = triplet_loss(emb, std::span<const Triplet>(ts), 0.0);
    CHECK(loss.value().item() == 0.0);
    tape.backward(loss);
  }
  auto st = OptimizerState<double>::zeros_like(m.parameters());
  adamw_step(m.parameters(), st, 0.01, AdamWSettings{0.9, 0.999, 1e-8, 0.0});
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(m.parameters().all()[i].var.value() == before[i]);
}

TEST_CASE("training reduces the loss and is deterministic") {
  const auto data = toy_dataset(4, 4, 10, 7);
  const auto tc = toy_train_config();

  model::GaitPTModel<float> m(toy_model_config(), 1);
  const double before = evaluate_loss(m, std::span<const skeleton::GaitSequence>(data), tc, 8, 99);
  std::size_t calls = 0;
  TrainHooks<float> hooks;
  hooks.on_epoch = [&](const EpochLog& log, const model::GaitPTModel<float>&, const OptimizerState<float>& st) {
    ++calls;
    CHECK(st.step == log.epoch * tc.batches_per_epoch);
  };
  const auto log1 = train(m, std::span<const skeleton::GaitSequence>(data), tc, hooks);
  const double after = evaluate_loss(m, std::span<const skeleton::GaitSequence>(data), tc, 8, 99);
  CHECK(calls == 1);
  REQUIRE(log1.size() == 1);
  CHECK(after < before);
  CHECK(log1[0].active_triplets >= 0.0);
  CHECK(log1[0].active_triplets <= 1.0);

  model::GaitPTModel<float> m2(toy_model_config(), 1);
  const auto log2 = train(m2, std::span<const skeleton::GaitSequence>(data), tc);
  CHECK(log1 == log2);
  for (std::size_t i = 0; i < m.parameters().all().size(); ++i)
    CHECK(m.parameters().all()[i].var.value() == m2.parameters().all()[i].var.value());
}

TEST_CASE("training rejects datasets too small for P x K") {
  const auto data = toy_dataset(3, 4, 10, 7);
  model::GaitPTModel<float> m(toy_model_config(), 1);
  auto tc = toy_train_config();
  try {
    train(m, std::span<const skeleton::GaitSequence>(data), tc);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  const auto short_data = toy_dataset(4, 4, 5, 7);
  CHECK_THROWS_AS(train(m, std::span<const skeleton::GaitSequence>(short_data), tc), Error);
}

TEST_CASE("epoch log JSON") {
  EpochLog log{3, 0.5, 0.25, 0.75, std::nullopt};
  CHECK(to_json_line(log) == R"({"epoch":3,"lr":0.5,"loss":0.25,"active_triplets":0.75})");
  log.rank1 = 1.0;
  CHECK(to_json_line(log) == R"({"epoch":3,"lr":0.5,"loss":0.25,"active_triplets":0.75,"rank1":1.0})");
}
