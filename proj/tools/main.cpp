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

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gaitpt/error.hpp"

using namespace gaitpt;
using namespace gaitpt::cli;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kInternal = 4 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
      return kUsage;
    case ErrorKind::Dimension:
    case ErrorKind::Usage:
      return kInternal;
    default:
      return kData;
  }
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option_function<std::uint64_t>("--seed", [&c](const std::uint64_t& s) { c.seed = s; },
                                          "Seed for every random stream");
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_flag("--json", c.json, "Machine-readable output");
}

template <typename T>
void optional_option(CLI::App* cmd, const std::string& name, std::optional<T>& target, const std::string& help) {
  cmd->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton-based gait recognition: synthetic data, training and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gaitpt 1.0.0");

  Common common;
  SynthArgs synth;
  TrainArgs train;
  EmbedArgs embed;
  EvalArgs eval;
  AblateArgs ablate;
  GradcheckArgs grad;
  PartitionArgs part;

  auto* s = app.add_subcommand("synth", "Generate a synthetic walker dataset");
  add_common(s, common);
  s->add_option("--out", synth.out, "Output directory")->required();
  optional_option(s, "--identities", synth.identities, "Number of identities");
  optional_option(s, "--sequences", synth.sequences, "Sequences per identity and view");
  optional_option(s, "--frames", synth.frames, "Frames per sequence");
  optional_option(s, "--train-per-view", synth.train_per_view, "Training sequences per identity and view");
  optional_option(s, "--noise", synth.noise, "Joint jitter (fraction of frame width)");
  s->add_option("--views", synth.views, "Comma-separated view angles in degrees")->delimiter(',');
  s->add_option("--conditions", synth.conditions, "Comma-separated conditions (NM,BG,CL)")->delimiter(',');

  auto* t = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_common(t, common);
  t->add_option("--data", train.data, "Dataset manifest")->required();
  t->add_option("--out", train.out, "Checkpoint path")->required();
  t->add_option("--log", train.log, "Epoch log (JSON lines); default <out>.log.jsonl");
  t->add_option("--stages", train.stages, "Active stages, e.g. 1,2,3,4");
  t->add_option("--scheme", train.scheme, "Stage-3 partitioning: HUL, HLR, OPPOSITE or ALL");
  optional_option(t, "--epochs", train.epochs, "Override the configured epoch count");
  t->add_option("--eval-every", train.eval_every, "Report gallery/probe Rank-1 every N epochs");

  auto* e = app.add_subcommand("embed", "Embed sequences with a trained checkpoint");
  add_common(e, common);
  e->add_option("--input", embed.input, "Sequence records (JSON lines)")->required();
  e->add_option("--ckpt", embed.ckpt, "Checkpoint")->required();
  e->add_option("--out", embed.out, "Output embeddings (JSON lines); default stdout");

  auto* v = app.add_subcommand("eval", "Evaluate a checkpoint on gallery and probe sequences");
  add_common(v, common);
  v->add_option("--gallery", eval.gallery, "Gallery sequence records");
  v->add_option("--probe", eval.probe, "Probe sequence records");
  v->add_option("--data", eval.data, "Dataset manifest (uses its gallery and probe splits)");
  v->add_option("--ckpt", eval.ckpt, "Checkpoint")->required();
  v->add_option("--protocol", eval.protocol, "casia or rankk")->capture_default_str();
  v->add_option("--ks", eval.ks, "Comma-separated ranks")->delimiter(',')->capture_default_str();

  auto* a = app.add_subcommand("ablate", "Stage ablation with repeated runs and Welch t-tests");
  add_common(a, common);
  a->add_option("--data", ablate.data, "Dataset manifest")->required();
  a->add_option("--subsets", ablate.subsets, "Stage subsets separated by |")->capture_default_str();
  a->add_option("--runs", ablate.runs, "Runs per subset")->capture_default_str();
  a->add_flag("!--no-ttest", ablate.ttest, "Skip pairwise Welch t-tests");
  optional_option(a, "--epochs", ablate.epochs, "Override the configured epoch count");

  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of every op and a tiny model");
  add_common(g, common);
  g->add_option("--size", grad.size, "Model size (tiny)")->capture_default_str();
  g->add_option("--tol", grad.tol, "Maximum relative error")->capture_default_str();

  auto* p = app.add_subcommand("partition-study", "Train and score every stage-3 partitioning scheme");
  add_common(p, common);
  p->add_option("--data", part.data, "Dataset manifest")->required();
  p->add_option("--runs", part.runs, "Runs per scheme")->capture_default_str();
  optional_option(p, "--epochs", part.epochs, "Override the configured epoch count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return run_synth(common, synth, std::cout, std::cerr);
    if (*t) return run_train(common, train, std::cout, std::cerr);
    if (*e) return run_embed(common, embed, std::cout, std::cerr);
    if (*v) return run_eval(common, eval, std::cout, std::cerr);
    if (*a) return run_ablate(common, ablate, std::cout, std::cerr);
    if (*g) return run_gradcheck(common, grad, std::cout, std::cerr);
    if (*p) return run_partition_study(common, part, std::cout, std::cerr);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
