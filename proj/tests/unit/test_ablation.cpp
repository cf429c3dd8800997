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

#include <json.hpp>

#include "gaitpt/error.hpp"
#include "gaitpt/evaluation/ablation.hpp"
#include "gaitpt/synthgait/synth.hpp"

using namespace gaitpt;
using namespace gaitpt::evaluation;

namespace {

AblationSettings tiny_settings() {
  AblationSettings s;
  s.model = model::tiny_config();
  s.train.identities_per_batch = 4;
  s.train.samples_per_identity = 2;
  s.train.epochs = 2;
  s.train.batches_per_epoch = 2;
  s.train.margin = 0.2;
  s.subsets = {{4}, {1, 4}};
  s.runs = 2;
  s.seed = 17;
  return s;
}

skeleton::SplitDataset tiny_data() {
  synthgait::SynthConfig c;
  c.identities = 4;
  c.sequences_per_identity = 4;
  c.views = {90};
  c.frames = 12;
  c.train_per_view = 2;
  return synthgait::make_split_dataset(c);
}

}  // namespace

TEST_CASE("ablation report shape and determinism") {
  const auto data = tiny_data();
  const auto settings = tiny_settings();
  std::vector<std::string> log;
  const auto a = ablation_run(data, settings, [&](const std::string& m) { log.push_back(m); });
  const auto b = ablation_run(data, settings);
  CHECK(log.size() == 4);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.rows[0].stages == std::set<int>{4});
  CHECK(a.rows[1].stages == std::set<int>{1, 4});
  for (const auto& r : a.rows) {
    REQUIRE(r.accuracies.size() == 2);
    CHECK(r.mean == doctest::Approx((r.accuracies[0] + r.accuracies[1]) / 2));
    for (double x : r.accuracies) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
  REQUIRE(a.pairs.size() == 1);
  CHECK(to_json(a) == to_json(b));
  CHECK(render_table(a) == render_table(b));

  const auto j = nlohmann::json::parse(to_json(a));
  CHECK(j["rows"].size() == 2);
  CHECK(j["pairwise_welch"][0]["a"] == "{4}");
  CHECK(j["pairwise_welch"][0]["b"] == "{1,4}");
}

TEST_CASE("single run or subset gives no pairs") {
  const auto data = tiny_data();
  auto s = tiny_settings();
  s.runs = 1;
  s.subsets = {{4}};
  const auto r = ablation_run(data, s);
  CHECK(r.rows.size() == 1);
  CHECK(r.rows[0].stddev == 0.0);
  CHECK(r.pairs.empty());

  s.subsets.clear();
  CHECK_THROWS_AS(ablation_run(data, s), Error);
}

TEST_CASE("derived seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) CHECK(seen.insert(derive_seed(5, i)).second);
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
  CHECK(derive_seed(5, 3) != derive_seed(6, 3));
}

TEST_CASE("stage labels") {
  CHECK(stages_label({1, 2, 3, 4}) == "{1,2,3,4}");
  CHECK(stages_label({4}) == "{4}");
}
