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

#include "gaitpt/model/gaitpt.hpp"

#include <cmath>
#include <string>

#include "gaitpt/error.hpp"

namespace gaitpt::model {

using num::Shape;
using num::Tensor;
using num::Var;

namespace {

template <typename T>
Tensor<T> xavier(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in + fan_out)));
  Tensor<T> t(Shape{fan_in, fan_out});
  for (auto& v : t.data()) v = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
Tensor<T> small_normal(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 0.02);
  Tensor<T> t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
Tensor<T> filled(std::size_t n, T value) {
  return Tensor<T>(Shape{n}, value);
}

template <typename T>
Var<T> as_batch(const Var<T>& feat, bool& single) {
  const auto r = feat.shape().size();
  if (r != 3 && r != 4) {
    fail(ErrorKind::Dimension, "stage features must be [n, t, C] or [B, n, t, C], got " +
                                   num::shape_str(feat.shape()));
  }
  single = r == 3;
  if (!single) return feat;
  Shape s = feat.shape();
  s.insert(s.begin(), 1);
  return num::reshape(feat, s);
}

template <typename T>
StageOutput<T> unbatch(StageOutput<T> out, bool single) {
  if (!single) return out;
  Shape s = out.feat.shape();
  s.erase(s.begin());
  return {num::reshape(out.feat, s), num::reshape(out.cls, Shape{out.cls.shape()[1]})};
}

template <typename T>
StageOutput<T> spatial_impl(const Encoder<T>& enc, const Var<T>& f, const EncoderRun& run) {
  const auto& s = f.shape();
  const std::size_t B = s[0], n = s[1], t = s[2], C = s[3];
  Var<T> h = encode(enc, num::reshape(f, Shape{B * n, t, C}), run);
  Var<T> cls = num::mean(num::reshape(num::slice(h, 1, 0, 1), Shape{B, n, C}), 1);
  Var<T> tokens = num::reshape(num::slice(h, 1, 1, t), Shape{B, n, t, C});
  return {tokens, cls};
}

template <typename T>
StageOutput<T> temporal_impl(const Encoder<T>& enc, const Var<T>& f, const EncoderRun& run) {
  const auto& s = f.shape();
  const std::size_t B = s[0], n = s[1], t = s[2], C = s[3];
  Var<T> x = num::reshape(num::permute(f, {0, 2, 1, 3}), Shape{B * t, n, C});
  Var<T> h = encode(enc, x, run);
  Var<T> cls = num::mean(num::reshape(num::slice(h, 1, 0, 1), Shape{B, t, C}), 1);
  Var<T> tokens =
      num::permute(num::reshape(num::slice(h, 1, 1, n), Shape{B, t, n, C}), {0, 2, 1, 3});
  return {tokens, cls};
}

}  // namespace

template <typename T>
Encoder<T> make_encoder(num::ParameterStore<T>& store, const std::string& prefix, std::size_t dim,
                        std::size_t blocks, std::size_t heads, std::size_t ff_mult,
                        std::size_t tokens, bool positional, std::mt19937_64& rng) {
  check(dim > 0 && heads > 0 && dim % heads == 0, ErrorKind::Config,
        prefix + ": dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(heads));
  Encoder<T> enc;
  enc.dim = dim;
  enc.heads = heads;
  enc.cls = store.add(prefix + ".cls", small_normal<T>(Shape{dim}, rng));
  if (positional) enc.pos = store.add(prefix + ".pos", small_normal<T>(Shape{tokens + 1, dim}, rng));
  const std::size_t hidden = ff_mult * dim;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::string p = prefix + ".block" + std::to_string(b);
    EncoderBlock<T> blk;
    blk.ln1_gain = store.add(p + ".ln1.gain", filled<T>(dim, T(1)));
    blk.ln1_bias = store.add(p + ".ln1.bias", filled<T>(dim, T(0)));
    blk.attn.wq = store.add(p + ".attn.wq", xavier<T>(dim, dim, rng));
    blk.attn.bq = store.add(p + ".attn.bq", filled<T>(dim, T(0)));
    blk.attn.wk = store.add(p + ".attn.wk", xavier<T>(dim, dim, rng));
    blk.attn.bk = store.add(p + ".attn.bk", filled<T>(dim, T(0)));
    blk.attn.wv = store.add(p + ".attn.wv", xavier<T>(dim, dim, rng));
    blk.attn.bv = store.add(p + ".attn.bv", filled<T>(dim, T(0)));
    blk.attn.wo = store.add(p + ".attn.wo", xavier<T>(dim, dim, rng));
    blk.attn.bo = store.add(p + ".attn.bo", filled<T>(dim, T(0)));
    blk.ln2_gain = store.add(p + ".ln2.gain", filled<T>(dim, T(1)));
    blk.ln2_bias = store.add(p + ".ln2.bias", filled<T>(dim, T(0)));
    blk.ff1_w = store.add(p + ".ff1.w", xavier<T>(dim, hidden, rng));
    blk.ff1_b = store.add(p + ".ff1.b", filled<T>(hidden, T(0)));
    blk.ff2_w = store.add(p + ".ff2.w", xavier<T>(hidden, dim, rng));
    blk.ff2_b = store.add(p + ".ff2.b", filled<T>(dim, T(0)));
    enc.blocks.push_back(std::move(blk));
  }
  return enc;
}

template <typename T>
Var<T> encode(const Encoder<T>& enc, const Var<T>& x, const EncoderRun& run) {
  const auto& s = x.shape();
  if (s.size() != 3 || s[2] != enc.dim) {
    fail(ErrorKind::Dimension, "encoder of width " + std::to_string(enc.dim) + " got input " +
                                   num::shape_str(s));
  }
  const std::size_t N = s[0], L = s[1], C = s[2];
  Var<T> cls = num::repeat(num::reshape(enc.cls, Shape{1, C}), N);
  std::vector<Var<T>> parts{cls, x};
  Var<T> h = num::concat<T>(parts, 1);
  if (enc.pos.defined()) {
    if (enc.pos.shape()[0] != L + 1) {
      fail(ErrorKind::Dimension, "positional table " + num::shape_str(enc.pos.shape()) +
                                     " does not fit " + std::to_string(L) + " tokens");
    }
    h = num::add(h, enc.pos);
  }
  const bool drop = run.dropout > 0.0 && run.rng != nullptr;
  for (const auto& blk : enc.blocks) {
    Var<T> a = num::multi_head_attention(num::layer_norm(h, blk.ln1_gain, blk.ln1_bias), blk.attn,
                                         enc.heads);
    if (drop) a = num::dropout(a, static_cast<T>(run.dropout), *run.rng);
    h = num::add(h, a);
    Var<T> f = num::layer_norm(h, blk.ln2_gain, blk.ln2_bias);
    f = num::linear(num::gelu(num::linear(f, blk.ff1_w, blk.ff1_b)), blk.ff2_w, blk.ff2_b);
    if (drop) f = num::dropout(f, static_cast<T>(run.dropout), *run.rng);
    h = num::add(h, f);
  }
  return h;
}

template <typename T>
Var<T> joint_merge(const Var<T>& feat, const skeleton::MergePlan& plan,
                   std::span<const Var<T>> weights, std::span<const Var<T>> biases,
                   bool allow_overlap) {
  const auto& s = feat.shape();
  if (s.size() < 2) fail(ErrorKind::Dimension, "joint_merge needs [..., t, C] features");
  const std::size_t t_in = s[s.size() - 2];
  const std::size_t c_in = s.back();
  if (plan.input_tokens != t_in) {
    fail(ErrorKind::Config, "merge plan expects " + std::to_string(plan.input_tokens) +
                                " tokens, features have " + std::to_string(t_in));
  }
  if (!plan.covers()) fail(ErrorKind::Config, "merge plan does not cover every input token");
  if (!allow_overlap && !plan.disjoint()) fail(ErrorKind::Config, "merge plan groups overlap");
  if (weights.size() != plan.groups.size() || biases.size() != plan.groups.size()) {
    fail(ErrorKind::Config, "merge plan has " + std::to_string(plan.groups.size()) +
                                " groups but " + std::to_string(weights.size()) + " projections");
  }
  const int axis = static_cast<int>(s.size()) - 2;
  Shape lead(s.begin(), s.end() - 2);
  std::vector<Var<T>> outs;
  outs.reserve(plan.groups.size());
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const auto& members = plan.groups[g];
    const auto& w = weights[g];
    if (w.shape().size() != 2 || w.shape()[0] != members.size() * c_in) {
      fail(ErrorKind::Dimension, "merge group " + std::to_string(g) + " of " +
                                     std::to_string(members.size()) + " tokens needs weight [" +
                                     std::to_string(members.size() * c_in) + ", C_out], got " +
                                     num::shape_str(w.shape()));
    }
    Shape flat = lead;
    flat.push_back(members.size() * c_in);
    Var<T> picked = num::reshape(num::index_select(feat, axis, members), flat);
    Var<T> proj = num::linear(picked, w, biases[g]);
    Shape one = lead;
    one.push_back(1);
    one.push_back(w.shape()[1]);
    outs.push_back(num::reshape(proj, one));
  }
  return num::concat<T>(outs, axis);
}

template <typename T>
GaitPTModel<T>::GaitPTModel(GaitPTConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const std::size_t c1 = config_.stage(1).dim;
  in_w_ = store_.add("input.w", xavier<T>(2, c1, rng));
  in_b_ = store_.add("input.b", filled<T>(c1, T(0)));

  stages_.resize(4);
  const auto active = config_.active_stages();
  int level = 1;
  std::size_t class_width = 0;
  for (int s : active) {
    const auto& sc = config_.stage(s);
    auto& m = stages_[static_cast<std::size_t>(s - 1)];
    const std::string prefix = "stage" + std::to_string(s);
    if (level < s) {
      skeleton::MergePlan plan = skeleton::merge_plan(level, config_.scheme);
      for (int l = level + 1; l < s; ++l)
        plan = skeleton::compose(plan, skeleton::merge_plan(l, config_.scheme));
      MergeLayer<T> merge;
      merge.in_dim = config_.stage(level).dim;
      merge.out_dim = sc.dim;
      for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        const std::string p = prefix + ".merge.group" + std::to_string(g);
        const std::size_t fan_in = plan.groups[g].size() * merge.in_dim;
        merge.weights.push_back(store_.add(p + ".w", xavier<T>(fan_in, merge.out_dim, rng)));
        merge.biases.push_back(store_.add(p + ".b", filled<T>(merge.out_dim, T(0))));
      }
      merge.plan = std::move(plan);
      m.merge = std::move(merge);
      level = s;
    }
    const std::size_t tokens = skeleton::token_count(s, config_.scheme);
    if (sc.has_spatial) {
      m.spatial = make_encoder(store_, prefix + ".spatial", sc.dim, sc.blocks, sc.heads,
                               config_.ff_mult, tokens, config_.spatial_pos, rng);
      class_width += sc.dim;
    }
    m.temporal = make_encoder(store_, prefix + ".temporal", sc.dim, sc.blocks, sc.heads,
                              config_.ff_mult, config_.sequence_length, config_.temporal_pos, rng);
    class_width += sc.dim;
  }
  head_w_ = store_.add("head.w", xavier<T>(class_width, config_.output_dim, rng));
  head_b_ = store_.add("head.b", filled<T>(config_.output_dim, T(0)));
}

template <typename T>
StageOutput<T> GaitPTModel<T>::spatial_attention_stage(const Var<T>& feat, int stage) const {
  if (stage < 1 || stage > 4) fail(ErrorKind::Config, "no stage " + std::to_string(stage));
  if (!config_.stage(stage).has_spatial) {
    fail(ErrorKind::Config, "stage " + std::to_string(stage) + " has no spatial attention");
  }
  const auto& m = stages_[static_cast<std::size_t>(stage - 1)];
  if (!m.spatial) fail(ErrorKind::Config, "stage " + std::to_string(stage) + " is inactive");
  bool single = false;
  Var<T> f = as_batch(feat, single);
  return unbatch(spatial_impl(*m.spatial, f, {}), single);
}

template <typename T>
StageOutput<T> GaitPTModel<T>::temporal_attention_stage(const Var<T>& feat, int stage) const {
  if (stage < 1 || stage > 4) fail(ErrorKind::Config, "no stage " + std::to_string(stage));
  const auto& m = stages_[static_cast<std::size_t>(stage - 1)];
  if (!m.temporal) fail(ErrorKind::Config, "stage " + std::to_string(stage) + " is inactive");
  bool single = false;
  Var<T> f = as_batch(feat, single);
  return unbatch(temporal_impl(*m.temporal, f, {}), single);
}

template <typename T>
Var<T> GaitPTModel<T>::forward(const Var<T>& window, ForwardTrace* trace) const {
  const auto& s = window.shape();
  if (s.size() != 3) {
    fail(ErrorKind::Input, "forward expects a window [n, 18, 2], got " + num::shape_str(s));
  }
  Var<T> out = forward_batch(num::reshape(window, Shape{1, s[0], s[1], s[2]}), trace);
  return num::reshape(out, Shape{config_.output_dim});
}

template <typename T>
Var<T> GaitPTModel<T>::forward_batch(const Var<T>& batch, ForwardTrace* trace,
                                     std::mt19937_64* dropout_rng) const {
  const auto& s = batch.shape();
  if (s.size() != 4 || s[2] != skeleton::kJoints || s[3] != 2) {
    fail(ErrorKind::Input, "forward expects [B, n, 18, 2], got " + num::shape_str(s));
  }
  if (s[1] != config_.sequence_length) {
    fail(ErrorKind::Input, "window has " + std::to_string(s[1]) + " frames, model expects " +
                               std::to_string(config_.sequence_length));
  }
  const EncoderRun run{config_.dropout, dropout_rng};
  Var<T> h = num::linear(batch, in_w_, in_b_);
  std::vector<Var<T>> classes;
  for (int st : config_.active_stages()) {
    const auto& m = stages_[static_cast<std::size_t>(st - 1)];
    if (m.merge) {
      const bool overlap = config_.scheme == skeleton::PartitionScheme::ALL;
      h = joint_merge<T>(h, m.merge->plan, m.merge->weights, m.merge->biases, overlap);
    }
    if (m.spatial) {
      auto o = spatial_impl(*m.spatial, h, run);
      h = o.feat;
      classes.push_back(o.cls);
      if (trace) trace->class_vectors.emplace_back(st, o.cls.shape()[1]);
    }
    auto o = temporal_impl(*m.temporal, h, run);
    h = o.feat;
    classes.push_back(o.cls);
    if (trace) {
      trace->class_vectors.emplace_back(st, o.cls.shape()[1]);
      trace->stages.push_back({st, h.shape()[2], h.shape()[3]});
    }
  }
  Var<T> cat = classes.size() == 1 ? classes.front() : num::concat<T>(classes, 1);
  return num::l2_normalize(num::linear(cat, head_w_, head_b_));
}

template <typename T>
Tensor<T> stack_windows(std::span<const skeleton::GaitSequence> windows) {
  if (windows.empty()) fail(ErrorKind::Input, "no windows to stack");
  const std::size_t n = windows.front().length();
  if (n == 0) fail(ErrorKind::Input, "window has no frames");
  Tensor<T> out(Shape{windows.size(), n, skeleton::kJoints, 2});
  T* p = out.ptr();
  for (const auto& w : windows) {
    if (w.length() != n) {
      fail(ErrorKind::Input, "window " + w.key + " has " + std::to_string(w.length()) +
                                 " frames, expected " + std::to_string(n));
    }
    for (const auto& pose : w.frames) {
      for (const auto& j : pose.joints) {
        *p++ = static_cast<T>(j.x);
        *p++ = static_cast<T>(j.y);
      }
    }
  }
  return out;
}

template <typename T>
std::vector<std::vector<double>> embed_windows(const GaitPTModel<T>& model,
                                               std::span<const skeleton::GaitSequence> windows,
                                               std::size_t batch) {
  if (batch == 0) batch = 1;
  num::TapeScope<T> no_grad(nullptr);
  std::vector<std::vector<double>> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); i += batch) {
    const auto chunk = windows.subspan(i, std::min(batch, windows.size() - i));
    Var<T> e = model.forward_batch(num::constant(stack_windows<T>(chunk)));
    const std::size_t d = e.shape()[1];
    const T* p = e.value().ptr();
    for (std::size_t r = 0; r < chunk.size(); ++r) out.emplace_back(p + r * d, p + (r + 1) * d);
  }
  return out;
}

#define GAITPT_INSTANTIATE_MODEL(T)                                                              \
  template Encoder<T> make_encoder(num::ParameterStore<T>&, const std::string&, std::size_t,     \
                                   std::size_t, std::size_t, std::size_t, std::size_t, bool,     \
                                   std::mt19937_64&);                                            \
  template Var<T> encode(const Encoder<T>&, const Var<T>&, const EncoderRun&);                   \
  template Var<T> joint_merge(const Var<T>&, const skeleton::MergePlan&,                         \
                              std::span<const Var<T>>, std::span<const Var<T>>, bool);           \
  template class GaitPTModel<T>;                                                                 \
  template Tensor<T> stack_windows(std::span<const skeleton::GaitSequence>);                     \
  template std::vector<std::vector<double>> embed_windows(                                       \
      const GaitPTModel<T>&, std::span<const skeleton::GaitSequence>, std::size_t);

GAITPT_INSTANTIATE_MODEL(float)
GAITPT_INSTANTIATE_MODEL(double)

#undef GAITPT_INSTANTIATE_MODEL

}  // namespace gaitpt::model
