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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gaitpt/skeleton/pose.hpp"

namespace gaitpt::evaluation {

struct EmbeddingRow {
  std::string key;
  std::string subject_id;
  skeleton::Condition condition = skeleton::Condition::NM;
  int view = 0;
  int session = 1;
  std::vector<double> embedding;
};

struct EmbeddingSet {
  std::vector<EmbeddingRow> rows;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  /// Throws unless keys are unique and every embedding has the same width.
  void validate() const;
};

/// Pairs each sequence's metadata with its embedding (same order, same count).
EmbeddingSet make_embedding_set(std::span<const skeleton::GaitSequence> seqs,
                                const std::vector<std::vector<double>>& embeddings);

/// Fraction of probes whose subject occurs among the k nearest gallery rows
/// (Euclidean, ties by ascending key). Probes of unseen subjects count as
/// misses.
std::map<std::size_t, double> rank_k_accuracy(const EmbeddingSet& gallery, const EmbeddingSet& probe,
                                              std::span<const std::size_t> ks);

/// Gallery indices ordered by distance to `query`, ties by key.
std::vector<std::size_t> ranked_gallery(const EmbeddingSet& gallery, std::span<const double> query);

struct RankTable {
  std::vector<std::pair<std::size_t, double>> ranks;  // ascending k
};

/// Rank-1/5/10/20.
RankTable grew_eval(const EmbeddingSet& gallery, const EmbeddingSet& probe);

struct ConditionReport {
  skeleton::Condition condition = skeleton::Condition::NM;
  /// accuracy[g][p] for gallery view index g, probe view index p; NaN when g == p.
  std::vector<std::vector<double>> accuracy;
  std::vector<double> probe_view_mean;  // over the other gallery views
  double mean = 0.0;                    // over probe views
};

struct CasiaReport {
  std::vector<int> views;  // ascending
  std::vector<ConditionReport> conditions;
};

/// Cross-view protocol: gallery NM sessions 1-4, probe groups NM 5-6,
/// BG 1-2 and CL 1-2, scored per (gallery view, probe view) pair.
CasiaReport casia_eval(const EmbeddingSet& embeddings);

std::string to_json(const CasiaReport& report);
std::string to_json(const RankTable& table);
std::string render_table(const CasiaReport& report);
std::string render_table(const RankTable& table);

}  // namespace gaitpt::evaluation
