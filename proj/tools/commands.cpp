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

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitpt/dataio/checkpoint.hpp"
#include "gaitpt/dataio/records.hpp"
#include "gaitpt/error.hpp"
#include "gaitpt/evaluation/ablation.hpp"
#include "gaitpt/evaluation/metrics.hpp"
#include "gaitpt/model/gradsuite.hpp"
#include "gaitpt/synthgait/synth.hpp"
#include "gaitpt/training/trainer.hpp"

namespace gaitpt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

dataio::RunConfig base_config(const Common& c) {
  dataio::RunConfig cfg = c.config.empty() ? dataio::RunConfig{} : dataio::load_config(c.config);
  if (c.seed) {
    cfg.train.seed = *c.seed;
    cfg.synth.seed = *c.seed;
  }
  return cfg;
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw UsageError(std::string(what) + " is required");
  if (!fs::is_regular_file(p)) throw UsageError(std::string(what) + " not found: " + p.string());
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::set<int> parse_stage_list(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() != 1 || item[0] < '1' || item[0] > '4')
      throw UsageError("invalid stage list '" + text + "': expected comma-separated stages 1-4");
    if (!out.insert(item[0] - '0').second) throw UsageError("stage " + item + " listed twice in '" + text + "'");
  }
  if (out.empty() || (!text.empty() && text.back() == ','))
    throw UsageError("invalid stage list '" + text + "'");
  return out;
}

std::vector<std::set<int>> parse_subsets(const std::string& text) {
  std::vector<std::set<int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '|')) out.push_back(parse_stage_list(item));
  if (out.empty()) throw UsageError("no stage subsets given");
  return out;
}

int run_synth(const Common& c, const SynthArgs& a, std::ostream& out, std::ostream&) {
  auto cfg = base_config(c).synth;
  if (a.out.empty()) throw UsageError("--out is required");
  if (a.identities) cfg.identities = *a.identities;
  if (a.sequences) cfg.sequences_per_identity = *a.sequences;
  if (a.frames) cfg.frames = *a.frames;
  if (a.train_per_view) cfg.train_per_view = *a.train_per_view;
  if (a.noise) cfg.noise = *a.noise;
  if (!a.views.empty()) cfg.views = a.views;
  if (!a.conditions.empty()) {
    cfg.conditions.clear();
    for (const auto& s : a.conditions) {
      auto k = skeleton::parse_condition(s);
      if (!k || *k == skeleton::Condition::OTHER) throw UsageError("unknown condition '" + s + "'");
      cfg.conditions.push_back(*k);
    }
  }
  cfg.validate();
  const auto manifest = synthgait::build_dataset(cfg, a.out);
  const auto m = dataio::read_manifest(manifest);
  if (c.json) {
    ordered_json j;
    j["manifest"] = manifest.string();
    j["train"] = m.train.size();
    j["gallery"] = m.gallery.size();
    j["probe"] = m.probe.size();
    j["config"] = dataio::to_json(cfg);
    out << j.dump() << '\n';
  } else {
    out << "wrote " << manifest.string() << ": " << m.train.size() << " train, " << m.gallery.size()
        << " gallery, " << m.probe.size() << " probe sequences\n";
  }
  return 0;
}

int run_train(const Common& c, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<std::set<int>> stages;
  if (!a.stages.empty()) stages = parse_stage_list(a.stages);
  require_file(a.data, "--data manifest");
  if (a.out.empty()) throw UsageError("--out is required");

  auto cfg = base_config(c);
  if (!a.scheme.empty()) {
    auto s = skeleton::parse_scheme(a.scheme);
    if (!s) throw UsageError("unknown scheme '" + a.scheme + "': expected HUL, HLR, OPPOSITE or ALL");
    cfg.model.scheme = *s;
  }
  if (stages) cfg.model = model::with_stages(cfg.model, *stages);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  cfg.train.validate();

  const auto data = dataio::load_split_dataset(a.data);
  model::GaitPTModel<float> net(cfg.model, cfg.train.seed);
  err << "training " << net.param_count() << " parameters on " << data.train.size() << " sequences\n";

  const fs::path log_path = a.log.empty() ? fs::path(a.out.string() + ".log.jsonl") : a.log;
  std::string log_text;
  training::TrainHooks<float> hooks;
  if (a.eval_every > 0) {
    hooks.evaluate = [&](std::size_t epoch, const model::GaitPTModel<float>& m) -> std::optional<double> {
      if (epoch % a.eval_every != 0) return std::nullopt;
      return evaluation::retrieval_rank1(m, data);
    };
  }
  hooks.on_epoch = [&](const training::EpochLog& log, const model::GaitPTModel<float>&,
                       const training::OptimizerState<float>&) {
    const std::string line = training::to_json_line(log);
    log_text += line + '\n';
    if (c.json) {
      out << line << '\n';
    } else {
      out << "epoch " << log.epoch << " lr " << sci(log.lr) << " loss " << fixed(log.loss, 6) << " active "
          << fixed(log.active_triplets, 3);
      if (log.rank1) out << " rank1 " << fixed(*log.rank1);
      out << '\n';
    }
    out.flush();
  };
  training::train(net, std::span<const skeleton::GaitSequence>(data.train), cfg.train, hooks);

  ordered_json extra;
  extra["epochs"] = cfg.train.epochs;
  extra["seed"] = cfg.train.seed;
  extra["train"] = dataio::to_json(cfg.train);
  dataio::save_checkpoint(net, a.out, extra);
  dataio::write_file(log_path, log_text);
  if (!c.json) out << "saved " << a.out.string() << '\n';
  return 0;
}

namespace {

void write_embeddings(std::ostream& os, const evaluation::EmbeddingSet& set) {
  for (const auto& r : set.rows) {
    ordered_json j;
    j["key"] = r.key;
    j["subject_id"] = r.subject_id;
    j["condition"] = std::string(skeleton::to_string(r.condition));
    j["view"] = r.view;
    j["session"] = r.session;
    j["embedding"] = r.embedding;
    os << j.dump() << '\n';
  }
}

model::GaitPTModel<float> load_model(const fs::path& ckpt) {
  require_file(ckpt, "--ckpt checkpoint");
  return dataio::load_checkpoint<float>(ckpt);
}

}  // namespace

int run_embed(const Common&, const EmbedArgs& a, std::ostream& out, std::ostream& err) {
  require_file(a.input, "--input sequence file");
  const auto net = load_model(a.ckpt);
  const auto seqs = dataio::read_sequences(a.input);
  const auto set = evaluation::embed_sequences(net, std::span<const skeleton::GaitSequence>(seqs));
  if (a.out.empty()) {
    write_embeddings(out, set);
  } else {
    std::ostringstream os;
    write_embeddings(os, set);
    dataio::write_file(a.out, os.str());
    err << "wrote " << set.size() << " embeddings to " << a.out.string() << '\n';
  }
  return 0;
}

int run_eval(const Common& c, const EvalArgs& a, std::ostream& out, std::ostream&) {
  if (a.protocol != "casia" && a.protocol != "rankk")
    throw UsageError("unknown protocol '" + a.protocol + "': expected casia or rankk");
  std::vector<skeleton::GaitSequence> gseq, pseq;
  if (!a.data.empty()) {
    if (!a.gallery.empty() || !a.probe.empty())
      throw UsageError("--data cannot be combined with --gallery/--probe");
    require_file(a.data, "--data manifest");
  } else {
    require_file(a.gallery, "--gallery sequence file");
    require_file(a.probe, "--probe sequence file");
  }
  const auto net = load_model(a.ckpt);
  if (!a.data.empty()) {
    auto split = dataio::load_split_dataset(a.data);
    gseq = std::move(split.gallery);
    pseq = std::move(split.probe);
  } else {
    gseq = dataio::read_sequences(a.gallery);
    pseq = dataio::read_sequences(a.probe);
  }
  auto gallery = evaluation::embed_sequences(net, std::span<const skeleton::GaitSequence>(gseq));
  auto probe = evaluation::embed_sequences(net, std::span<const skeleton::GaitSequence>(pseq));

  if (a.protocol == "rankk") {
    if (a.ks.empty()) throw UsageError("--ks must list at least one rank");
    evaluation::RankTable table;
    for (const auto& [k, acc] : evaluation::rank_k_accuracy(gallery, probe, a.ks)) table.ranks.emplace_back(k, acc);
    out << (c.json ? evaluation::to_json(table) + "\n" : evaluation::render_table(table));
    return 0;
  }
  // The CASIA protocol assigns gallery and probe roles by condition and
  // session, so both files are pooled.
  evaluation::EmbeddingSet all = std::move(gallery);
  for (auto& r : probe.rows) all.rows.push_back(std::move(r));
  const auto report = evaluation::casia_eval(all);
  out << (c.json ? evaluation::to_json(report) + "\n" : evaluation::render_table(report));
  return 0;
}

int run_ablate(const Common& c, const AblateArgs& a, std::ostream& out, std::ostream& err) {
  const auto subsets = parse_subsets(a.subsets);
  if (a.runs == 0) throw UsageError("--runs must be at least 1");
  if (a.ttest && a.runs < 2)
    throw UsageError("Welch t-tests need --runs >= 2 (pass --no-ttest to skip them)");
  require_file(a.data, "--data manifest");
  const auto cfg = base_config(c);
  evaluation::AblationSettings s;
  s.model = cfg.model;
  s.train = cfg.train;
  if (a.epochs) s.train.epochs = *a.epochs;
  s.train.validate();
  s.subsets = subsets;
  s.runs = a.runs;
  s.seed = cfg.train.seed;
  const auto data = dataio::load_split_dataset(a.data);
  auto report = evaluation::ablation_run(data, s, [&](const std::string& m) { err << m << '\n'; });
  if (!a.ttest) report.pairs.clear();
  out << (c.json ? evaluation::to_json(report) + "\n" : evaluation::render_table(report));
  return 0;
}

int run_gradcheck(const Common& c, const GradcheckArgs& a, std::ostream& out, std::ostream&) {
  if (a.size != "tiny") throw UsageError("unknown --size '" + a.size + "': only tiny is supported");
  if (!(a.tol >= 0.0)) throw UsageError("--tol must be non-negative");
  auto entries = c.seed ? model::op_grad_suite(a.tol, *c.seed) : model::op_grad_suite(a.tol);
  entries.push_back(c.seed ? model::model_grad_check(model::tiny_config(), a.tol, *c.seed)
                           : model::model_grad_check(model::tiny_config(), a.tol));
  bool ok = true;
  for (const auto& e : entries) ok = ok && e.report.pass;
  if (c.json) {
    ordered_json j;
    j["tol"] = a.tol;
    auto arr = ordered_json::array();
    for (const auto& e : entries)
      arr.push_back({{"name", e.name},
                     {"max_rel_err", e.report.max_rel_err},
                     {"coordinates", e.report.coordinates},
                     {"worst", e.report.worst},
                     {"pass", e.report.pass}});
    j["checks"] = arr;
    j["pass"] = ok;
    out << j.dump() << '\n';
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %12s %7s  %s\n", "check", "max_rel_err", "coords", "result");
    out << buf;
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof buf, "%-22s %12.3e %7zu  %s\n", e.name.c_str(), e.report.max_rel_err,
                    e.report.coordinates, e.report.pass ? "pass" : "FAIL");
      out << buf;
    }
    out << (ok ? "all checks passed" : "gradient check failed") << " (tol " << sci(a.tol) << ")\n";
  }
  return ok ? 0 : 1;
}

int run_partition_study(const Common& c, const PartitionArgs& a, std::ostream& out, std::ostream& err) {
  if (a.runs == 0) throw UsageError("--runs must be at least 1");
  require_file(a.data, "--data manifest");
  auto cfg = base_config(c);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  cfg.train.validate();
  const auto data = dataio::load_split_dataset(a.data);

  ordered_json rows = ordered_json::array();
  std::ostringstream table;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s  %s\n", "scheme", "mean", "std", "runs");
  table << buf;
  using skeleton::PartitionScheme;
  for (auto scheme : {PartitionScheme::HUL, PartitionScheme::HLR, PartitionScheme::OPPOSITE, PartitionScheme::ALL}) {
    auto mc = cfg.model;
    mc.scheme = scheme;
    std::vector<double> acc;
    for (std::size_t r = 0; r < a.runs; ++r) {
      const auto seed = evaluation::derive_seed(cfg.train.seed, r);
      model::GaitPTModel<float> net(mc, seed);
      auto tc = cfg.train;
      tc.seed = seed;
      training::train(net, std::span<const skeleton::GaitSequence>(data.train), tc);
      acc.push_back(evaluation::retrieval_rank1(net, data));
      err << skeleton::to_string(scheme) << " run " << r + 1 << "/" << a.runs << " rank1 " << fixed(acc.back()) << '\n';
    }
    const std::string name(skeleton::to_string(scheme));
    rows.push_back({{"scheme", name}, {"accuracies", acc}, {"mean", mean_of(acc)}, {"stddev", stddev_of(acc)}});
    std::snprintf(buf, sizeof buf, "%-10s %8.4f %8.4f ", name.c_str(), mean_of(acc), stddev_of(acc));
    table << buf;
    for (double x : acc) table << ' ' << fixed(x);
    table << '\n';
  }
  if (c.json) {
    out << ordered_json{{"schemes", rows}}.dump() << '\n';
  } else {
    out << table.str();
  }
  return 0;
}

}  // namespace gaitpt::cli
