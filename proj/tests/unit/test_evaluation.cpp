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

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "../support/casia_fixture.hpp"
#include "gaitpt/error.hpp"
#include "gaitpt/evaluation/ablation.hpp"
#include "gaitpt/evaluation/stats.hpp"

using namespace gaitpt;
using namespace gaitpt::evaluation;

namespace {

EmbeddingSet random_set(std::mt19937_64& rng, std::size_t rows, std::size_t subjects,
                        const std::string& prefix, bool grid) {
  EmbeddingSet s;
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < rows; ++i) {
    EmbeddingRow r;
    r.key = prefix + std::to_string(rng() % 1000) + "-" + std::to_string(i);
    r.subject_id = "S" + std::to_string(rng() % subjects);
    r.embedding.resize(3);
    for (auto& v : r.embedding) v = grid ? static_cast<double>(rng() % 3) : g(rng);
    s.rows.push_back(r);
  }
  return s;
}

// Position of the first correct gallery row, counted as the number of rows
// that precede it under (distance, key) order; SIZE_MAX when absent.
std::size_t first_hit_oracle(const EmbeddingSet& gallery, const EmbeddingRow& probe) {
  auto dist = [&](const EmbeddingRow& g) {
    long double s = 0;
    for (std::size_t k = 0; k < g.embedding.size(); ++k) {
      const long double d = static_cast<long double>(g.embedding[k]) - probe.embedding[k];
      s += d * d;
    }
    return s;
  };
  std::size_t best = SIZE_MAX;
  for (const auto& c : gallery.rows) {
    if (c.subject_id != probe.subject_id) continue;
    std::size_t before = 0;
    for (const auto& j : gallery.rows) {
      if (dist(j) < dist(c) || (dist(j) == dist(c) && j.key < c.key)) ++before;
    }
    best = std::min(best, before);
  }
  return best;
}

struct WelchOracle {
  long double t, df, p;
};

WelchOracle welch_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  auto stats = [](const std::vector<double>& v) {
    long double m = 0;
    for (double a : v) m += a;
    m /= v.size();
    long double s = 0;
    for (double a : v) s += (a - m) * (a - m);
    return std::pair{m, s / (v.size() - 1)};
  };
  auto [mx, vx] = stats(x);
  auto [my, vy] = stats(y);
  const long double ax = vx / x.size(), ay = vy / y.size();
  WelchOracle o;
  o.t = (mx - my) / std::sqrt(ax + ay);
  o.df = (ax + ay) * (ax + ay) / (ax * ax / (x.size() - 1) + ay * ay / (y.size() - 1));
  boost::math::students_t_distribution<long double> dist(o.df);
  o.p = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(o.t)));
  return o;
}

}  // namespace

TEST_CASE("rank-k basics") {
  EmbeddingSet gallery{{{"ga", "A", skeleton::Condition::NM, 0, 1, {0.0, 0.0}},
                        {"gb", "B", skeleton::Condition::NM, 0, 1, {1.0, 0.0}}}};
  EmbeddingSet probe{{{"p", "A", skeleton::Condition::NM, 0, 5, {0.1, 0.0}}}};
  const std::size_t ks[] = {1, 2};
  auto r = rank_k_accuracy(gallery, probe, ks);
  CHECK(r.at(1) == 1.0);
  CHECK(r.at(2) == 1.0);

  // Equidistant probe: the lower key wins the tie.
  EmbeddingSet tie{{{"p", "B", skeleton::Condition::NM, 0, 5, {0.5, 0.0}}}};
  CHECK(rank_k_accuracy(gallery, tie, ks).at(1) == 0.0);
  gallery.rows[1].key = "g0";
  CHECK(rank_k_accuracy(gallery, tie, ks).at(1) == 1.0);

  EmbeddingSet stranger{{{"p", "Z", skeleton::Condition::NM, 0, 5, {0.0, 0.0}}}};
  CHECK(rank_k_accuracy(gallery, stranger, ks).at(2) == 0.0);
  const std::size_t beyond[] = {3, 20};
  CHECK(rank_k_accuracy(gallery, stranger, beyond).at(20) == 0.0);
  CHECK(rank_k_accuracy(gallery, probe, beyond).at(3) == 1.0);

  try {
    rank_k_accuracy(EmbeddingSet{}, probe, ks);
    FAIL("expected a protocol error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Protocol);
  }
  const std::size_t zero[] = {0};
  CHECK_THROWS_AS(rank_k_accuracy(gallery, probe, zero), Error);
}

TEST_CASE("rank-k matches the brute-force oracle") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 150; ++trial) {
    const bool grid = trial % 3 == 0;
    auto gallery = random_set(rng, 3 + rng() % 12, 5, "g", grid);
    auto probe = random_set(rng, 10, 6, "p", grid);
    const std::size_t ks[] = {1, 2, 3, 5, 20};
    const auto got = rank_k_accuracy(gallery, probe, ks);
    for (std::size_t k : ks) {
      std::size_t hits = 0;
      for (const auto& p : probe.rows) hits += first_hit_oracle(gallery, p) < k;
      CHECK(got.at(k) == static_cast<double>(hits) / probe.size());
    }
    double prev = 0.0;
    for (auto [k, acc] : got) {
      CHECK(acc >= prev);
      prev = acc;
    }
    const auto table = grew_eval(gallery, probe);
    REQUIRE(table.ranks.size() == 4);
    const std::size_t grew_ks[] = {1, 5, 10, 20};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(table.ranks[i].first == grew_ks[i]);
      std::size_t hits = 0;
      for (const auto& p : probe.rows) hits += first_hit_oracle(gallery, p) < grew_ks[i];
      CHECK(table.ranks[i].second == static_cast<double>(hits) / probe.size());
    }
  }
}

TEST_CASE("rank at gallery size is 1 when every probe subject is enrolled") {
  std::mt19937_64 rng(4);
  auto gallery = random_set(rng, 12, 3, "g", false);
  for (int s = 0; s < 3; ++s) gallery.rows[static_cast<std::size_t>(s)].subject_id = "S" + std::to_string(s);
  auto probe = random_set(rng, 20, 3, "p", false);
  const std::size_t ks[] = {gallery.size()};
  CHECK(rank_k_accuracy(gallery, probe, ks).at(gallery.size()) == 1.0);
}

TEST_CASE("cross-view protocol reproduces the hand-computed matrix") {
  const auto fx = gaitpt::testing::casia_fixture();
  const auto rep = casia_eval(fx.set);
  CHECK(rep.views == std::vector<int>(gaitpt::testing::kCasiaViews.begin(), gaitpt::testing::kCasiaViews.end()));
  REQUIRE(rep.conditions.size() == 3);
  for (const auto& c : rep.conditions) {
    const auto& want = fx.expected.at(std::string(skeleton::to_string(c.condition)));
    for (std::size_t g = 0; g < 11; ++g) {
      for (std::size_t p = 0; p < 11; ++p) {
        if (g == p) {
          CHECK(std::isnan(c.accuracy[g][p]));
        } else {
          CHECK(c.accuracy[g][p] == want[g][p]);
        }
      }
    }
    double overall = 0.0;
    for (std::size_t p = 0; p < 11; ++p) {
      double s = 0.0;
      for (std::size_t g = 0; g < 11; ++g)
        if (g != p) s += want[g][p];
      CHECK(c.probe_view_mean[p] == doctest::Approx(s / 10.0).epsilon(1e-15));
      overall += s / 10.0;
    }
    CHECK(c.mean == doctest::Approx(overall / 11.0).epsilon(1e-15));
  }
  CHECK(to_json(rep) == to_json(casia_eval(fx.set)));
  CHECK(render_table(rep).find("probe CL") != std::string::npos);
}

TEST_CASE("cross-view protocol edge cases") {
  auto fx = gaitpt::testing::casia_fixture();
  SUBCASE("perfect separation") {
    for (auto& r : fx.set.rows) {
      std::fill(r.embedding.begin(), r.embedding.end(), 0.0);
      r.embedding[static_cast<std::size_t>(r.subject_id[1] - '0')] = 1.0;
    }
    for (const auto& c : casia_eval(fx.set).conditions) CHECK(c.mean == 1.0);
  }
  SUBCASE("half of the gallery views fail for one probe view") {
    // Probe view 0: every probe misses at gallery views 18..90 and hits at 108..180.
    for (auto& r : fx.set.rows) {
      std::fill(r.embedding.begin(), r.embedding.end(), 0.0);
      const auto s = static_cast<std::size_t>(r.subject_id[1] - '0');
      const bool gallery = r.condition == skeleton::Condition::NM && r.session <= 4;
      const bool shifted = gallery && r.view >= 18 && r.view <= 90;
      r.embedding[shifted ? (s + 1) % 4 : s] = 1.0;
    }
    const auto rep = casia_eval(fx.set);
    CHECK(rep.conditions[0].probe_view_mean[0] == 0.5);
  }
  SUBCASE("gaps are reported") {
    std::erase_if(fx.set.rows, [](const EmbeddingRow& r) {
      return r.condition == skeleton::Condition::NM && r.session <= 4 && r.view == 36;
    });
    std::erase_if(fx.set.rows, [](const EmbeddingRow& r) {
      return r.condition == skeleton::Condition::BG && r.view == 144;
    });
    try {
      casia_eval(fx.set);
      FAIL("expected a protocol error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Protocol);
      const std::string msg = e.what();
      CHECK(msg.find("gallery NM#1-4 at view 36") != std::string::npos);
      CHECK(msg.find("probe BG at view 144") != std::string::npos);
    }
  }
}

TEST_CASE("incomplete beta agrees with boost") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 40.0), ux(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng), x = ux(rng);
    CHECK(std::abs(incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) < 1e-12);
  }
}

TEST_CASE("welch t-test against a high-precision oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::normal_distribution<double> gx(rng() % 5, 0.2 + (rng() % 10) / 5.0);
    std::normal_distribution<double> gy(rng() % 5, 0.2 + (rng() % 10) / 5.0);
    std::vector<double> x(2 + rng() % 20), y(2 + rng() % 20);
    for (auto& v : x) v = gx(rng);
    for (auto& v : y) v = gy(rng);
    const auto got = welch_t_test(x, y);
    const auto want = welch_oracle(x, y);
    CHECK(std::abs(got.t - static_cast<double>(want.t)) <= 1e-6 * std::max(1.0L, std::abs(want.t)));
    CHECK(std::abs(got.df - static_cast<double>(want.df)) <= 1e-6 * std::max(1.0L, want.df));
    CHECK(std::abs(got.p - static_cast<double>(want.p)) <= 1e-6);
    const auto swapped = welch_t_test(y, x);
    CHECK(swapped.t == -got.t);
    CHECK(swapped.p == got.p);
  }
}

TEST_CASE("welch t-test point cases") {
  std::vector<double> a{1, 2, 3}, b{11, 12, 13};
  const auto same = welch_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK(welch_t_test(a, b).p < 0.05);
  std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(welch_t_test(flat, flat), Error);
  std::vector<double> one{1};
  CHECK_THROWS_AS(welch_t_test(one, a), Error);
  CHECK_NOTHROW(welch_t_test(flat, a));
}

TEST_CASE("pearson r") {
  std::vector<double> x{1, 2, 3, 4.5, 7};
  std::vector<double> twice, neg;
  for (double v : x) {
    twice.push_back(2 * v);
    neg.push_back(-v);
  }
  CHECK(pearson_r(x, twice) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson_r(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  std::vector<double> flat(5, 1.0);
  CHECK_THROWS_AS(pearson_r(x, flat), Error);
  std::vector<double> shorter{1, 2};
  CHECK_THROWS_AS(pearson_r(x, shorter), Error);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(2 + rng() % 30), ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = g(rng);
      ys[i] = 0.5 * xs[i] + g(rng);
    }
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const long double n = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += (long double)xs[i] * xs[i];
      syy += (long double)ys[i] * ys[i];
      sxy += (long double)xs[i] * ys[i];
    }
    const long double cov = sxy / n - (sx / n) * (sy / n);
    const long double want = cov / std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
    const double r = pearson_r(xs, ys);
    CHECK(std::abs(r - static_cast<double>(want)) < 1e-9);
    std::vector<double> affine;
    for (double v : ys) affine.push_back(3.0 * v + 7.0);
    CHECK(std::abs(pearson_r(xs, affine) - r) < 1e-12);
  }
}
