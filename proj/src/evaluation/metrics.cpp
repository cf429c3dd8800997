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

#include "gaitpt/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gaitpt/error.hpp"

namespace gaitpt::evaluation {

using skeleton::Condition;

void EmbeddingSet::validate() const {
  std::set<std::string> keys;
  for (const auto& r : rows) {
    if (!keys.insert(r.key).second) fail(ErrorKind::Input, "duplicate embedding key '" + r.key + "'");
    if (r.embedding.size() != rows.front().embedding.size()) {
      fail(ErrorKind::Input, "embedding '" + r.key + "' has width " + std::to_string(r.embedding.size()) +
                                 ", expected " + std::to_string(rows.front().embedding.size()));
    }
  }
}

EmbeddingSet make_embedding_set(std::span<const skeleton::GaitSequence> seqs,
                                const std::vector<std::vector<double>>& embeddings) {
  if (seqs.size() != embeddings.size()) {
    fail(ErrorKind::Input, std::to_string(seqs.size()) + " sequences but " +
                               std::to_string(embeddings.size()) + " embeddings");
  }
  EmbeddingSet set;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const auto& s = seqs[i];
    set.rows.push_back({s.key, s.subject_id, s.condition, s.view, s.session, embeddings[i]});
  }
  set.validate();
  return set;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::Input, "embedding widths differ: " + std::to_string(a.size()) + " vs " +
                               std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<std::size_t> ranked_gallery(const EmbeddingSet& gallery, std::span<const double> query) {
  std::vector<double> dist(gallery.size());
  for (std::size_t i = 0; i < gallery.size(); ++i) dist[i] = squared_distance(gallery.rows[i].embedding, query);
  std::vector<std::size_t> order(gallery.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return gallery.rows[a].key < gallery.rows[b].key;
  });
  return order;
}

std::map<std::size_t, double> rank_k_accuracy(const EmbeddingSet& gallery, const EmbeddingSet& probe,
                                              std::span<const std::size_t> ks) {
  if (gallery.empty()) fail(ErrorKind::Protocol, "empty gallery");
  if (probe.empty()) fail(ErrorKind::Protocol, "empty probe set");
  if (ks.empty()) fail(ErrorKind::Input, "no rank levels requested");
  for (auto k : ks)
    if (k == 0) fail(ErrorKind::Input, "rank level k must be at least 1");

  std::vector<std::size_t> hits(ks.size(), 0);
  for (const auto& p : probe.rows) {
    const auto order = ranked_gallery(gallery, p.embedding);
    std::optional<std::size_t> first;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (gallery.rows[order[r]].subject_id == p.subject_id) {
        first = r;
        break;
      }
    }
    if (!first) continue;
    for (std::size_t i = 0; i < ks.size(); ++i) hits[i] += *first < ks[i] ? 1 : 0;
  }
  std::map<std::size_t, double> out;
  for (std::size_t i = 0; i < ks.size(); ++i)
    out[ks[i]] = static_cast<double>(hits[i]) / static_cast<double>(probe.size());
  return out;
}

RankTable grew_eval(const EmbeddingSet& gallery, const EmbeddingSet& probe) {
  const std::size_t ks[] = {1, 5, 10, 20};
  RankTable t;
  for (auto [k, acc] : rank_k_accuracy(gallery, probe, ks)) t.ranks.emplace_back(k, acc);
  return t;
}

namespace {

struct ProbeGroup {
  Condition condition;
  int first_session;
  int last_session;
};

constexpr ProbeGroup kProbeGroups[] = {
    {Condition::NM, 5, 6},
    {Condition::BG, 1, 2},
    {Condition::CL, 1, 2},
};

bool in_gallery(const EmbeddingRow& r) {
  return r.condition == Condition::NM && r.session >= 1 && r.session <= 4;
}

bool in_group(const EmbeddingRow& r, const ProbeGroup& g) {
  return r.condition == g.condition && r.session >= g.first_session && r.session <= g.last_session;
}

}  // namespace

CasiaReport casia_eval(const EmbeddingSet& embeddings) {
  embeddings.validate();
  std::set<int> view_set;
  std::map<int, EmbeddingSet> gallery;
  std::map<std::pair<int, int>, EmbeddingSet> probes;  // (group, view)
  std::set<int> groups_present;
  for (const auto& r : embeddings.rows) {
    if (in_gallery(r)) {
      gallery[r.view].rows.push_back(r);
      view_set.insert(r.view);
    }
    for (int g = 0; g < 3; ++g) {
      if (in_group(r, kProbeGroups[g])) {
        probes[{g, r.view}].rows.push_back(r);
        groups_present.insert(g);
        view_set.insert(r.view);
      }
    }
  }
  std::vector<std::string> gaps;
  for (int v : view_set)
    if (!gallery.contains(v)) gaps.push_back("gallery NM#1-4 at view " + std::to_string(v));
  for (int g : groups_present) {
    for (int v : view_set) {
      if (!probes.contains({g, v})) {
        gaps.push_back("probe " + std::string(skeleton::to_string(kProbeGroups[g].condition)) +
                       " at view " + std::to_string(v));
      }
    }
  }
  if (groups_present.empty()) gaps.push_back("no probe rows (NM#5-6, BG#1-2, CL#1-2)");
  if (!gaps.empty()) {
    std::string msg = "cross-view protocol gaps: ";
    for (std::size_t i = 0; i < gaps.size(); ++i) msg += (i ? "; " : "") + gaps[i];
    fail(ErrorKind::Protocol, msg);
  }
  if (view_set.size() < 2) fail(ErrorKind::Protocol, "cross-view evaluation needs at least two views");

  CasiaReport rep;
  rep.views.assign(view_set.begin(), view_set.end());
  const std::size_t V = rep.views.size();
  const std::size_t k1[] = {1};
  for (int g : groups_present) {
    ConditionReport c;
    c.condition = kProbeGroups[g].condition;
    c.accuracy.assign(V, std::vector<double>(V, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t gi = 0; gi < V; ++gi) {
      for (std::size_t pi = 0; pi < V; ++pi) {
        if (gi == pi) continue;
        c.accuracy[gi][pi] =
            rank_k_accuracy(gallery.at(rep.views[gi]), probes.at({g, rep.views[pi]}), k1).at(1);
      }
    }
    for (std::size_t pi = 0; pi < V; ++pi) {
      double s = 0.0;
      for (std::size_t gi = 0; gi < V; ++gi)
        if (gi != pi) s += c.accuracy[gi][pi];
      c.probe_view_mean.push_back(s / static_cast<double>(V - 1));
    }
    c.mean = std::accumulate(c.probe_view_mean.begin(), c.probe_view_mean.end(), 0.0) /
             static_cast<double>(V);
    rep.conditions.push_back(std::move(c));
  }
  return rep;
}

std::string to_json(const CasiaReport& report) {
  nlohmann::ordered_json j;
  j["views"] = report.views;
  nlohmann::ordered_json conds = nlohmann::ordered_json::object();
  for (const auto& c : report.conditions) {
    nlohmann::ordered_json cj;
    nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
    for (const auto& row : c.accuracy) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (double v : row) r.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v));
      matrix.push_back(r);
    }
    cj["accuracy"] = matrix;
    cj["probe_view_mean"] = c.probe_view_mean;
    cj["mean"] = c.mean;
    conds[std::string(skeleton::to_string(c.condition))] = cj;
  }
  j["conditions"] = conds;
  return j.dump();
}

std::string to_json(const RankTable& table) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (auto [k, acc] : table.ranks) j["rank" + std::to_string(k)] = acc;
  return j.dump();
}

namespace {

std::string cell(double v) {
  char buf[32];
  if (std::isnan(v)) return "     -";
  std::snprintf(buf, sizeof buf, "%6.1f", 100.0 * v);
  return buf;
}

}  // namespace

std::string render_table(const CasiaReport& report) {
  std::ostringstream os;
  for (const auto& c : report.conditions) {
    os << "probe " << skeleton::to_string(c.condition) << " (rank-1 %, rows: gallery view)\n";
    os << "       ";
    for (int v : report.views) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%6d", v);
      os << buf;
    }
    os << '\n';
    for (std::size_t g = 0; g < report.views.size(); ++g) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%6d ", report.views[g]);
      os << buf;
      for (double v : c.accuracy[g]) os << cell(v);
      os << '\n';
    }
    os << "  mean ";
    for (double v : c.probe_view_mean) os << cell(v);
    os << "\n  overall " << cell(c.mean) << "\n";
  }
  return os.str();
}

std::string render_table(const RankTable& table) {
  std::ostringstream os;
  for (auto [k, acc] : table.ranks) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "rank-%-3zu %6.2f%%\n", k, 100.0 * acc);
    os << buf;
  }
  return os.str();
}

}  // namespace gaitpt::evaluation
