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

// Hand-built cross-view fixture: 4 subjects, 11 views, gallery NM#1-4 and
// probe groups NM#5-6, BG#1-2, CL#1-2. Embeddings live in R^4 with subject s
// at the unit vector e_s, except for three planted confusions whose effect
// on the accuracy matrix is worked out by hand below.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gaitpt/evaluation/metrics.hpp"

namespace gaitpt::testing {

inline constexpr std::array<int, 11> kCasiaViews{0, 18, 36, 54, 72, 90, 108, 126, 144, 162, 180};

struct CasiaFixture {
  evaluation::EmbeddingSet set;
  // expected[condition][g][p] for view indices; NaN on the diagonal.
  std::map<std::string, std::vector<std::vector<double>>> expected;
};

inline CasiaFixture casia_fixture() {
  using skeleton::Condition;
  auto unit = [](int s) {
    std::vector<double> v(4, 0.0);
    v[static_cast<std::size_t>(s)] = 1.0;
    return v;
  };
  CasiaFixture fx;
  auto add = [&](int subject, Condition c, int session, int view, std::vector<double> e) {
    const std::string id = "S" + std::to_string(subject);
    const std::string key = id + "-" + std::string(skeleton::to_string(c)) + "-" +
                            std::to_string(session) + "-" + std::to_string(view);
    fx.set.rows.push_back({key, id, c, view, session, std::move(e)});
  };
  for (int s = 0; s < 4; ++s) {
    for (int v : kCasiaViews) {
      for (int sess = 1; sess <= 4; ++sess) {
        // Confusion 1: S1's gallery at 90 deg sits next to S0 (e_0 + 0.1 e_3).
        auto e = unit(s);
        if (s == 1 && v == 90) e = {1.0, 0.0, 0.0, 0.1};
        add(s, Condition::NM, sess, v, e);
      }
      for (int sess = 5; sess <= 6; ++sess) {
        // Confusion 2: S0's NM#5 probe at 0 deg equals S1's displaced gallery.
        auto e = unit(s);
        if (s == 0 && sess == 5 && v == 0) e = {1.0, 0.0, 0.0, 0.1};
        add(s, Condition::NM, sess, v, e);
      }
      for (int sess = 1; sess <= 2; ++sess) {
        add(s, Condition::BG, sess, v, unit(s));
        // Confusion 3: S3's CL probes at 180 deg look exactly like S2.
        add(s, Condition::CL, sess, v, (s == 3 && v == 180) ? unit(2) : unit(s));
      }
    }
  }

  // Hand derivation (8 probes per cell: 4 subjects x 2 sessions).
  // Gallery view 90: S1's probes e_1 are at squared distance 2 from S0/S2/S3
  // and 2.01 from S1's displaced gallery, so both S1 probes miss -> 6/8.
  // NM, probe view 0: S0's NM#5 probe (e_0 + 0.1 e_3) is at distance 0.1 from
  // S0's gallery at every view except 90, where S1's gallery matches it
  // exactly -> cell (90, 0) loses one more probe: 5/8.
  // CL, probe view 180: S3's two probes equal S2's gallery at every view -> 6/8,
  // and 4/8 at gallery view 90.
  const std::size_t V = kCasiaViews.size();
  const std::size_t g90 = 5, p0 = 0, p180 = 10;
  for (const char* c : {"NM", "BG", "CL"}) {
    std::vector<std::vector<double>> m(V, std::vector<double>(V, 1.0));
    for (std::size_t i = 0; i < V; ++i) m[i][i] = std::nan("");
    for (std::size_t p = 0; p < V; ++p)
      if (p != g90) m[g90][p] = 6.0 / 8.0;
    fx.expected[c] = m;
  }
  fx.expected["NM"][g90][p0] = 5.0 / 8.0;
  for (std::size_t g = 0; g < V; ++g)
    if (g != p180) fx.expected["CL"][g][p180] = 6.0 / 8.0;
  fx.expected["CL"][g90][p180] = 4.0 / 8.0;
  return fx;
}

}  // namespace gaitpt::testing
