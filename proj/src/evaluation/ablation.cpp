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

#include "gaitpt/evaluation/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "gaitpt/error.hpp"
#include "gaitpt/evaluation/stats.hpp"
#include "gaitpt/skeleton/preprocess.hpp"
#include "gaitpt/training/trainer.hpp"

namespace gaitpt::evaluation {

template <typename T>
EmbeddingSet embed_sequences(const model::GaitPTModel<T>& model,
                             std::span<const skeleton::GaitSequence> seqs) {
  std::vector<skeleton::GaitSequence> windows;
  windows.reserve(seqs.size());
  for (const auto& s : seqs) {
    windows.push_back(skeleton::sample_window(s, model.config().sequence_length,
                                              skeleton::WindowMode::EvalHead));
  }
  const auto emb = model::embed_windows(model, std::span<const skeleton::GaitSequence>(windows));
  return make_embedding_set(seqs, emb);
}

template <typename T>
double retrieval_rank1(const model::GaitPTModel<T>& model, const skeleton::SplitDataset& data) {
  const std::size_t k1[] = {1};
  return rank_k_accuracy(embed_sequences(model, std::span<const skeleton::GaitSequence>(data.gallery)),
                         embed_sequences(model, std::span<const skeleton::GaitSequence>(data.probe)), k1)
      .at(1);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string stages_label(const std::set<int>& stages) {
  std::string s = "{";
  for (int v : stages) s += (s.size() > 1 ? "," : "") + std::to_string(v);
  return s + "}";
}

AblationReport ablation_run(const skeleton::SplitDataset& data, const AblationSettings& settings,
                            const std::function<void(const std::string&)>& progress) {
  if (settings.subsets.empty()) fail(ErrorKind::Config, "no stage subsets to compare");
  if (settings.runs == 0) fail(ErrorKind::Config, "runs must be at least 1");
  AblationReport rep;
  for (const auto& subset : settings.subsets) {
    AblationRow row;
    row.stages = subset;
    const auto cfg = model::with_stages(settings.model, subset);
    for (std::size_t r = 0; r < settings.runs; ++r) {
      const std::uint64_t seed = derive_seed(settings.seed, r);
      model::GaitPTModel<float> m(cfg, seed);
      auto tc = settings.train;
      tc.seed = seed;
      training::train(m, std::span<const skeleton::GaitSequence>(data.train), tc);
      row.accuracies.push_back(retrieval_rank1(m, data));
      if (progress) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "stages %s run %zu/%zu rank1 %.4f", stages_label(subset).c_str(),
                      r + 1, settings.runs, row.accuracies.back());
        progress(buf);
      }
    }
    double s = 0.0;
    for (double a : row.accuracies) s += a;
    row.mean = s / static_cast<double>(row.accuracies.size());
    if (row.accuracies.size() > 1) {
      double v = 0.0;
      for (double a : row.accuracies) v += (a - row.mean) * (a - row.mean);
      row.stddev = std::sqrt(v / static_cast<double>(row.accuracies.size() - 1));
    }
    rep.rows.push_back(std::move(row));
  }
  if (settings.runs >= 2) {
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rep.rows.size(); ++j) {
        AblationPair pair{i, j, std::nullopt, std::nullopt};
        try {
          const auto w = welch_t_test(rep.rows[i].accuracies, rep.rows[j].accuracies);
          pair.t = w.t;
          pair.p = w.p;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Statistics) throw;
        }
        rep.pairs.push_back(pair);
      }
    }
  }
  return rep;
}

std::string to_json(const AblationReport& report) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json o;
    o["stages"] = std::vector<int>(r.stages.begin(), r.stages.end());
    o["accuracies"] = r.accuracies;
    o["mean"] = r.mean;
    o["stddev"] = r.stddev;
    rows.push_back(o);
  }
  j["rows"] = rows;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : report.pairs) {
    nlohmann::ordered_json o;
    o["a"] = stages_label(report.rows[p.first].stages);
    o["b"] = stages_label(report.rows[p.second].stages);
    o["t"] = p.t ? nlohmann::ordered_json(*p.t) : nlohmann::ordered_json(nullptr);
    o["p"] = p.p ? nlohmann::ordered_json(*p.p) : nlohmann::ordered_json(nullptr);
    pairs.push_back(o);
  }
  j["pairwise_welch"] = pairs;
  return j.dump();
}

std::string render_table(const AblationReport& report) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-12s %8s %8s  %s\n", "stages", "mean", "std", "runs");
  os << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-12s %8.4f %8.4f ", stages_label(r.stages).c_str(), r.mean, r.stddev);
    os << buf;
    for (double a : r.accuracies) {
      std::snprintf(buf, sizeof buf, " %.4f", a);
      os << buf;
    }
    os << '\n';
  }
  for (const auto& p : report.pairs) {
    const std::string a = stages_label(report.rows[p.first].stages);
    const std::string b = stages_label(report.rows[p.second].stages);
    if (p.p) {
      std::snprintf(buf, sizeof buf, "welch %s vs %s: t=%.4f p=%.4g\n", a.c_str(), b.c_str(), *p.t, *p.p);
    } else {
      std::snprintf(buf, sizeof buf, "welch %s vs %s: undefined (zero variance)\n", a.c_str(), b.c_str());
    }
    os << buf;
  }
  return os.str();
}

template EmbeddingSet embed_sequences(const model::GaitPTModel<float>&, std::span<const skeleton::GaitSequence>);
template EmbeddingSet embed_sequences(const model::GaitPTModel<double>&, std::span<const skeleton::GaitSequence>);
template double retrieval_rank1(const model::GaitPTModel<float>&, const skeleton::SplitDataset&);
template double retrieval_rank1(const model::GaitPTModel<double>&, const skeleton::SplitDataset&);

}  // namespace gaitpt::evaluation
