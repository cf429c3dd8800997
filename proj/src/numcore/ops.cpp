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

#include "gaitpt/numcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gaitpt/error.hpp"
#include "gaitpt/numcore/kernels.hpp"

namespace gaitpt::num {
namespace {

template <typename T>
const kernels::Table<T>& K() {
  return kernels::active<T>();
}

template <typename T>
using Handles = std::vector<std::shared_ptr<Node<T>>>;

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

struct Broadcast {
  Shape out;
  bool a_small = false;
  bool b_small = false;
  std::size_t inner = 0;  // size of the small operand (or of both when equal)
  std::size_t outer = 1;
};

Broadcast broadcast_shapes(const Shape& a, const Shape& b, const char* op) {
  if (a == b) return {a, false, false, shape_size(a), 1};
  if (is_suffix(b, a)) return {a, false, true, shape_size(b), shape_size(a) / shape_size(b)};
  if (is_suffix(a, b)) return {b, true, false, shape_size(a), shape_size(b) / shape_size(a)};
  fail(ErrorKind::Dimension, std::string(op) + ": shapes " + shape_str(a) + " and " +
                                 shape_str(b) + " are not broadcast-compatible");
}

// (outer, extent, inner) decomposition around one axis.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.extent = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

template <typename T>
void transpose2d(const T* src, std::size_t rows, std::size_t cols, T* dst) {
  constexpr std::size_t B = 16;
  for (std::size_t r0 = 0; r0 < rows; r0 += B) {
    const std::size_t r1 = std::min(rows, r0 + B);
    for (std::size_t c0 = 0; c0 < cols; c0 += B) {
      const std::size_t c1 = std::min(cols, c0 + B);
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) dst[c * rows + r] = src[r * cols + c];
    }
  }
}

template <typename T>
void accumulate(Node<T>& node, const T* g, std::size_t n) {
  K<T>().axpy(n, T(1), g, grad_buffer(node).ptr());
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementwise

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  const auto bc = broadcast_shapes(a.shape(), b.shape(), "add");
  Tensor<T> out(bc.out);
  const T* pa = a.value().ptr();
  const T* pb = b.value().ptr();
  T* po = out.ptr();
  const auto& k = K<T>();
  if (!bc.a_small && !bc.b_small) {
    k.add(out.size(), pa, pb, po);
  } else {
    for (std::size_t o = 0; o < bc.outer; ++o) {
      const T* x = bc.a_small ? pa : pa + o * bc.inner;
      const T* y = bc.b_small ? pb : pb + o * bc.inner;
      k.add(bc.inner, x, y, po + o * bc.inner);
    }
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a, &b})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle(), b.handle()},
                 [an = a.handle(), bn = b.handle(), bc](const Tensor<T>& g) {
                   for (auto* node : {an.get(), bn.get()}) {
                     if (!node->requires_grad) continue;
                     const bool small = node == an.get() ? bc.a_small : bc.b_small;
                     if (!small) {
                       accumulate(*node, g.ptr(), g.size());
                     } else {
                       T* dst = grad_buffer(*node).ptr();
                       for (std::size_t o = 0; o < bc.outer; ++o)
                         K<T>().axpy(bc.inner, T(1), g.ptr() + o * bc.inner, dst);
                     }
                   }
                 });
  }
  return result;
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  return add(a, scale(b, T(-1)));
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  const auto bc = broadcast_shapes(a.shape(), b.shape(), "mul");
  Tensor<T> out(bc.out);
  const T* pa = a.value().ptr();
  const T* pb = b.value().ptr();
  T* po = out.ptr();
  const auto& k = K<T>();
  if (!bc.a_small && !bc.b_small) {
    k.mul(out.size(), pa, pb, po);
  } else {
    for (std::size_t o = 0; o < bc.outer; ++o) {
      const T* x = bc.a_small ? pa : pa + o * bc.inner;
      const T* y = bc.b_small ? pb : pb + o * bc.inner;
      k.mul(bc.inner, x, y, po + o * bc.inner);
    }
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a, &b})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle(), b.handle()},
                 [an = a.handle(), bn = b.handle(), bc](const Tensor<T>& g) {
                   const T* pa = an->value.ptr();
                   const T* pb = bn->value.ptr();
                   const std::size_t n = g.size();
                   // d(a*b)/da = b, broadcast as in the forward pass.
                   auto grad_into = [&](Node<T>& self, bool self_small, const T* other,
                                        bool other_small) {
                     T* dst = grad_buffer(self).ptr();
                     if (!self_small && !other_small) {
                       for (std::size_t i = 0; i < n; ++i) dst[i] += g[i] * other[i];
                     } else if (!self_small) {
                       for (std::size_t o = 0; o < bc.outer; ++o)
                         for (std::size_t i = 0; i < bc.inner; ++i)
                           dst[o * bc.inner + i] += g[o * bc.inner + i] * other[i];
                     } else {
                       for (std::size_t o = 0; o < bc.outer; ++o)
                         for (std::size_t i = 0; i < bc.inner; ++i)
                           dst[i] += g[o * bc.inner + i] * other[o * bc.inner + i];
                     }
                   };
                   if (an->requires_grad) grad_into(*an, bc.a_small, pb, bc.b_small);
                   if (bn->requires_grad) grad_into(*bn, bc.b_small, pa, bc.a_small);
                 });
  }
  return result;
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
  Tensor<T> out(a.shape());
  const T* pa = a.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] * factor;
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()}, [an = a.handle(), factor](const Tensor<T>& g) {
      K<T>().axpy(g.size(), factor, g.ptr(), grad_buffer(*an).ptr());
    });
  }
  return result;
}

template <typename T>
Var<T> add_scalar(const Var<T>& a, T offset) {
  Tensor<T> out(a.shape());
  const T* pa = a.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] + offset;
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()}, [an = a.handle()](const Tensor<T>& g) {
      accumulate(*an, g.ptr(), g.size());
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Matrix product

namespace {

struct MatmulPlan {
  std::size_t m = 0, k = 0, n = 0;
  Shape out;
  std::vector<std::pair<std::size_t, std::size_t>> batches;  // (a batch, b batch)
  bool flat_rows = false;  // b has no batch extent: fold a's batches into rows
};

MatmulPlan plan_matmul(const Shape& sa, const Shape& sb) {
  if (sa.size() < 2 || sb.size() < 2) {
    fail(ErrorKind::Dimension,
         "matmul needs rank >= 2 operands, got " + shape_str(sa) + " and " + shape_str(sb));
  }
  MatmulPlan p;
  p.m = sa[sa.size() - 2];
  p.k = sa[sa.size() - 1];
  p.n = sb[sb.size() - 1];
  if (sb[sb.size() - 2] != p.k) {
    fail(ErrorKind::Dimension,
         "matmul inner extents differ: " + shape_str(sa) + " @ " + shape_str(sb));
  }
  const Shape ba(sa.begin(), sa.end() - 2);
  const Shape bb(sb.begin(), sb.end() - 2);
  const std::size_t rank = std::max(ba.size(), bb.size());
  Shape pa(rank - ba.size(), 1), pb(rank - bb.size(), 1);
  pa.insert(pa.end(), ba.begin(), ba.end());
  pb.insert(pb.end(), bb.begin(), bb.end());
  Shape bo(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    if (pa[i] != pb[i] && pa[i] != 1 && pb[i] != 1) {
      fail(ErrorKind::Dimension,
           "matmul batch extents not broadcastable: " + shape_str(sa) + " @ " + shape_str(sb));
    }
    bo[i] = std::max(pa[i], pb[i]);
  }
  p.out = bo;
  p.out.push_back(p.m);
  p.out.push_back(p.n);
  p.flat_rows = shape_size(pb) == 1 && rank == ba.size();

  const std::size_t total = shape_size(bo);
  p.batches.reserve(total);
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t oa = 0, ob = 0;
    for (std::size_t d = 0; d < rank; ++d) {
      oa = oa * pa[d] + (pa[d] == 1 ? 0 : idx[d]);
      ob = ob * pb[d] + (pb[d] == 1 ? 0 : idx[d]);
    }
    p.batches.emplace_back(oa, ob);
    for (std::size_t d = rank; d-- > 0;) {
      if (++idx[d] < bo[d]) break;
      idx[d] = 0;
    }
  }
  return p;
}

}  // namespace

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  auto plan = plan_matmul(a.shape(), b.shape());
  Tensor<T> out(plan.out);
  const auto& k = K<T>();
  const T* pa = a.value().ptr();
  const T* pb = b.value().ptr();
  const std::size_t sa = plan.m * plan.k, sb = plan.k * plan.n, so = plan.m * plan.n;
  if (plan.flat_rows) {
    k.gemm(plan.batches.size() * plan.m, plan.n, plan.k, pa, plan.k, pb, plan.n, out.ptr(),
           plan.n, false);
  } else {
    for (std::size_t t = 0; t < plan.batches.size(); ++t) {
      const auto [ia, ib] = plan.batches[t];
      k.gemm(plan.m, plan.n, plan.k, pa + ia * sa, plan.k, pb + ib * sb, plan.n,
             out.ptr() + t * so, plan.n, false);
    }
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a, &b})) {
    result.set_requires_grad(true);
    tape->record(
        result.handle(), {a.handle(), b.handle()},
        [an = a.handle(), bn = b.handle(), plan = std::move(plan)](const Tensor<T>& g) {
          const auto& k = K<T>();
          const std::size_t m = plan.m, kk = plan.k, n = plan.n;
          const std::size_t sa = m * kk, sb = kk * n, so = m * n;
          const T* pa = an->value.ptr();
          const T* pb = bn->value.ptr();
          std::vector<T> scratch;
          if (an->requires_grad) {
            // dA = dC * B^T
            T* ga = grad_buffer(*an).ptr();
            scratch.resize(sb);
            if (plan.flat_rows) {
              transpose2d(pb, kk, n, scratch.data());
              k.gemm(plan.batches.size() * m, kk, n, g.ptr(), n, scratch.data(), kk, ga, kk, true);
            } else {
              for (std::size_t t = 0; t < plan.batches.size(); ++t) {
                const auto [ia, ib] = plan.batches[t];
                transpose2d(pb + ib * sb, kk, n, scratch.data());
                k.gemm(m, kk, n, g.ptr() + t * so, n, scratch.data(), kk, ga + ia * sa, kk, true);
              }
            }
          }
          if (bn->requires_grad) {
            // dB = A^T * dC
            T* gb = grad_buffer(*bn).ptr();
            if (plan.flat_rows) {
              const std::size_t rows = plan.batches.size() * m;
              scratch.resize(rows * kk);
              transpose2d(pa, rows, kk, scratch.data());
              k.gemm(kk, n, rows, scratch.data(), rows, g.ptr(), n, gb, n, true);
            } else {
              scratch.resize(sa);
              for (std::size_t t = 0; t < plan.batches.size(); ++t) {
                const auto [ia, ib] = plan.batches[t];
                transpose2d(pa + ia * sa, m, kk, scratch.data());
                k.gemm(kk, n, m, scratch.data(), m, g.ptr() + t * so, n, gb + ib * sb, n, true);
              }
            }
          }
        });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Layout

namespace {

struct PermutePlan {
  Shape out;
  std::vector<std::size_t> src_stride;  // input stride for each output axis
};

PermutePlan plan_permute(const Shape& in, const std::vector<std::size_t>& perm) {
  const std::size_t r = in.size();
  std::vector<bool> seen(r, false);
  if (perm.size() != r) {
    fail(ErrorKind::Dimension, "permutation length " + std::to_string(perm.size()) +
                                   " does not match rank of " + shape_str(in));
  }
  for (auto p : perm) {
    if (p >= r || seen[p]) fail(ErrorKind::Dimension, "invalid permutation for " + shape_str(in));
    seen[p] = true;
  }
  std::vector<std::size_t> stride(r, 1);
  for (std::size_t d = r; d-- > 1;) stride[d - 1] = stride[d] * in[d];
  PermutePlan plan;
  plan.out.resize(r);
  plan.src_stride.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    plan.out[i] = in[perm[i]];
    plan.src_stride[i] = stride[perm[i]];
  }
  return plan;
}

// Calls f(dst_index, src_index) in output order.
template <typename F>
void walk_permuted(const PermutePlan& plan, F&& f) {
  const std::size_t r = plan.out.size();
  const std::size_t n = shape_size(plan.out);
  if (r == 0) {
    f(std::size_t{0}, std::size_t{0});
    return;
  }
  const std::size_t last = plan.out[r - 1];
  const std::size_t last_stride = plan.src_stride[r - 1];
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t j = 0; j < n; j += last) {
    for (std::size_t i = 0; i < last; ++i) f(j + i, src + i * last_stride);
    for (std::size_t d = r - 1; d-- > 0;) {
      src += plan.src_stride[d];
      if (++idx[d] < plan.out[d]) break;
      src -= plan.src_stride[d] * plan.out[d];
      idx[d] = 0;
    }
  }
}

}  // namespace

template <typename T>
Var<T> permute(const Var<T>& a, const std::vector<std::size_t>& perm) {
  auto plan = plan_permute(a.shape(), perm);
  Tensor<T> out(plan.out);
  const T* src = a.value().ptr();
  T* dst = out.ptr();
  walk_permuted(plan, [&](std::size_t j, std::size_t s) { dst[j] = src[s]; });
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()},
                 [an = a.handle(), plan = std::move(plan)](const Tensor<T>& g) {
                   T* ga = grad_buffer(*an).ptr();
                   const T* pg = g.ptr();
                   walk_permuted(plan, [&](std::size_t j, std::size_t s) { ga[s] += pg[j]; });
                 });
  }
  return result;
}

template <typename T>
Var<T> transpose(const Var<T>& a, int axis0, int axis1) {
  const std::size_t r = a.shape().size();
  std::vector<std::size_t> perm(r);
  for (std::size_t i = 0; i < r; ++i) perm[i] = i;
  std::swap(perm[normalize_axis(axis0, r)], perm[normalize_axis(axis1, r)]);
  return permute(a, perm);
}

template <typename T>
Var<T> reshape(const Var<T>& a, Shape shape) {
  Var<T> result(a.value().reshaped(std::move(shape)));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()}, [an = a.handle()](const Tensor<T>& g) {
      accumulate(*an, g.ptr(), g.size());
    });
  }
  return result;
}

template <typename T>
Var<T> concat(std::span<const Var<T>> parts, int axis) {
  if (parts.empty()) fail(ErrorKind::Dimension, "concat of zero tensors");
  const Shape& first = parts[0].shape();
  const std::size_t ax = normalize_axis(axis, first.size());
  Shape out_shape = first;
  out_shape[ax] = 0;
  std::vector<std::size_t> chunk(parts.size());
  const auto base = split_at(first, ax);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Shape& s = parts[p].shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == ax || s[d] == first[d];
    if (!ok) {
      fail(ErrorKind::Dimension,
           "concat: shape " + shape_str(s) + " incompatible with " + shape_str(first));
    }
    out_shape[ax] += s[ax];
    chunk[p] = s[ax] * base.inner;
  }
  Tensor<T> out(out_shape);
  const std::size_t row = out_shape[ax] * base.inner;
  for (std::size_t o = 0; o < base.outer; ++o) {
    std::size_t off = o * row;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const T* src = parts[p].value().ptr() + o * chunk[p];
      std::copy(src, src + chunk[p], out.ptr() + off);
      off += chunk[p];
    }
  }
  Var<T> result(std::move(out));
  Tape<T>* tape = active_tape<T>();
  bool any = false;
  for (const auto& p : parts) any = any || p.requires_grad();
  if (tape && any) {
    result.set_requires_grad(true);
    Handles<T> handles;
    for (const auto& p : parts) handles.push_back(p.handle());
    tape->record(result.handle(), handles,
                 [handles, chunk, row, outer = base.outer](const Tensor<T>& g) {
                   std::size_t start = 0;
                   for (std::size_t p = 0; p < handles.size(); ++p) {
                     if (handles[p]->requires_grad) {
                       T* dst = grad_buffer(*handles[p]).ptr();
                       for (std::size_t o = 0; o < outer; ++o)
                         K<T>().axpy(chunk[p], T(1), g.ptr() + o * row + start,
                                     dst + o * chunk[p]);
                     }
                     start += chunk[p];
                   }
                 });
  }
  return result;
}

template <typename T>
Var<T> slice(const Var<T>& a, int axis, std::size_t start, std::size_t length) {
  const std::size_t ax = normalize_axis(axis, a.shape().size());
  const auto sp = split_at(a.shape(), ax);
  if (length == 0 || start + length > sp.extent) {
    fail(ErrorKind::Dimension, "slice [" + std::to_string(start) + ", " +
                                   std::to_string(start + length) + ") out of range for axis " +
                                   std::to_string(axis) + " of " + shape_str(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[ax] = length;
  Tensor<T> out(out_shape);
  const std::size_t in_row = sp.extent * sp.inner;
  const std::size_t out_row = length * sp.inner;
  const T* src = a.value().ptr();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    const T* s = src + o * in_row + start * sp.inner;
    std::copy(s, s + out_row, out.ptr() + o * out_row);
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()},
                 [an = a.handle(), sp, start, in_row, out_row](const Tensor<T>& g) {
                   T* ga = grad_buffer(*an).ptr();
                   for (std::size_t o = 0; o < sp.outer; ++o)
                     K<T>().axpy(out_row, T(1), g.ptr() + o * out_row,
                                 ga + o * in_row + start * sp.inner);
                 });
  }
  return result;
}

template <typename T>
Var<T> index_select(const Var<T>& a, int axis, const std::vector<std::size_t>& indices) {
  const std::size_t ax = normalize_axis(axis, a.shape().size());
  const auto sp = split_at(a.shape(), ax);
  if (indices.empty()) fail(ErrorKind::Dimension, "index_select with no indices");
  for (auto i : indices) {
    if (i >= sp.extent) {
      fail(ErrorKind::Dimension, "index " + std::to_string(i) + " out of range for axis " +
                                     std::to_string(axis) + " of " + shape_str(a.shape()));
    }
  }
  Shape out_shape = a.shape();
  out_shape[ax] = indices.size();
  Tensor<T> out(out_shape);
  const T* src = a.value().ptr();
  T* dst = out.ptr();
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t j = 0; j < indices.size(); ++j) {
      const T* s = src + (o * sp.extent + indices[j]) * sp.inner;
      std::copy(s, s + sp.inner, dst + (o * indices.size() + j) * sp.inner);
    }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()},
                 [an = a.handle(), sp, indices](const Tensor<T>& g) {
                   T* ga = grad_buffer(*an).ptr();
                   for (std::size_t o = 0; o < sp.outer; ++o)
                     for (std::size_t j = 0; j < indices.size(); ++j)
                       K<T>().axpy(sp.inner, T(1),
                                   g.ptr() + (o * indices.size() + j) * sp.inner,
                                   ga + (o * sp.extent + indices[j]) * sp.inner);
                 });
  }
  return result;
}

template <typename T>
Var<T> repeat(const Var<T>& a, std::size_t count) {
  if (count == 0) fail(ErrorKind::Dimension, "repeat count must be positive");
  Shape out_shape{count};
  out_shape.insert(out_shape.end(), a.shape().begin(), a.shape().end());
  Tensor<T> out(out_shape);
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < count; ++c)
    std::copy(a.value().ptr(), a.value().ptr() + n, out.ptr() + c * n);
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()}, [an = a.handle(), count, n](const Tensor<T>& g) {
      T* ga = grad_buffer(*an).ptr();
      for (std::size_t c = 0; c < count; ++c) K<T>().axpy(n, T(1), g.ptr() + c * n, ga);
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Var<T> sum(const Var<T>& a) {
  Var<T> result(Tensor<T>::scalar(K<T>().sum(a.value().ptr(), a.size())));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()}, [an = a.handle()](const Tensor<T>& g) {
      const T gv = g[0];
      for (auto& x : grad_buffer(*an).data()) x += gv;
    });
  }
  return result;
}

namespace {

template <typename T>
Var<T> reduce_axis(const Var<T>& a, int axis, bool average) {
  const std::size_t ax = normalize_axis(axis, a.shape().size());
  const auto sp = split_at(a.shape(), ax);
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(ax));
  Tensor<T> out(out_shape);
  const T factor = average ? T(1) / static_cast<T>(sp.extent) : T(1);
  const T* src = a.value().ptr();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    T* dst = out.ptr() + o * sp.inner;
    for (std::size_t e = 0; e < sp.extent; ++e)
      K<T>().axpy(sp.inner, factor, src + (o * sp.extent + e) * sp.inner, dst);
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {a.handle()}, [an = a.handle(), sp, factor](const Tensor<T>& g) {
      T* ga = grad_buffer(*an).ptr();
      for (std::size_t o = 0; o < sp.outer; ++o)
        for (std::size_t e = 0; e < sp.extent; ++e)
          K<T>().axpy(sp.inner, factor, g.ptr() + o * sp.inner, ga + (o * sp.extent + e) * sp.inner);
    });
  }
  return result;
}

}  // namespace

template <typename T>
Var<T> sum(const Var<T>& a, int axis) {
  return reduce_axis(a, axis, false);
}

template <typename T>
Var<T> mean(const Var<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Var<T> mean(const Var<T>& a, int axis) {
  return reduce_axis(a, axis, true);
}

// ---------------------------------------------------------------------------
// Normalization and activations

template <typename T>
Var<T> softmax(const Var<T>& a, int axis) {
  const std::size_t ax = normalize_axis(axis, a.shape().size());
  const auto sp = split_at(a.shape(), ax);
  const T* src = a.value().ptr();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(src[i])) {
      fail(ErrorKind::NumericInput, "softmax input contains a non-finite value at flat index " +
                                        std::to_string(i));
    }
  }
  Tensor<T> out(a.shape());
  T* dst = out.ptr();
  const std::size_t st = sp.inner;
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      const std::size_t base = o * sp.extent * sp.inner + i;
      T mx = src[base];
      for (std::size_t e = 1; e < sp.extent; ++e) mx = std::max(mx, src[base + e * st]);
      T total = 0;
      for (std::size_t e = 0; e < sp.extent; ++e) {
        const T v = std::exp(src[base + e * st] - mx);
        dst[base + e * st] = v;
        total += v;
      }
      const T inv = T(1) / total;
      for (std::size_t e = 0; e < sp.extent; ++e) dst[base + e * st] *= inv;
    }
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&a})) {
    result.set_requires_grad(true);
    std::weak_ptr<Node<T>> self = result.handle();
    tape->record(result.handle(), {a.handle()}, [an = a.handle(), self, sp](const Tensor<T>& g) {
      const T* y = self.lock()->value.ptr();
      T* ga = grad_buffer(*an).ptr();
      const std::size_t st = sp.inner;
      for (std::size_t o = 0; o < sp.outer; ++o) {
        for (std::size_t i = 0; i < sp.inner; ++i) {
          const std::size_t base = o * sp.extent * sp.inner + i;
          T dotgy = 0;
          for (std::size_t e = 0; e < sp.extent; ++e) dotgy += g[base + e * st] * y[base + e * st];
          for (std::size_t e = 0; e < sp.extent; ++e) {
            const std::size_t j = base + e * st;
            ga[j] += y[j] * (g[j] - dotgy);
          }
        }
      }
    });
  }
  return result;
}

template <typename T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& bias, T eps) {
  const std::size_t c = x.shape().empty() ? 1 : x.shape().back();
  if (gain.shape() != Shape{c} || bias.shape() != Shape{c}) {
    fail(ErrorKind::Dimension, "layer_norm gain/bias " + shape_str(gain.shape()) + "/" +
                                   shape_str(bias.shape()) + " do not match last extent of " +
                                   shape_str(x.shape()));
  }
  if (!(eps > T(0))) fail(ErrorKind::Input, "layer_norm eps must be positive");
  const std::size_t rows = x.size() / c;
  Tensor<T> out(x.shape());
  Tensor<T> xhat(x.shape());
  std::vector<T> rstd(rows);
  const T* px = x.value().ptr();
  const T* pg = gain.value().ptr();
  const T* pb = bias.value().ptr();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = px + r * c;
    T mu = 0;
    for (std::size_t j = 0; j < c; ++j) mu += row[j];
    mu /= static_cast<T>(c);
    T var = 0;
    for (std::size_t j = 0; j < c; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<T>(c);
    const T rs = T(1) / std::sqrt(var + eps);
    rstd[r] = rs;
    T* xh = xhat.ptr() + r * c;
    T* o = out.ptr() + r * c;
    for (std::size_t j = 0; j < c; ++j) {
      xh[j] = (row[j] - mu) * rs;
      o[j] = xh[j] * pg[j] + pb[j];
    }
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&x, &gain, &bias})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {x.handle(), gain.handle(), bias.handle()},
                 [xn = x.handle(), gn = gain.handle(), bn = bias.handle(), xhat = std::move(xhat),
                  rstd = std::move(rstd), c, rows](const Tensor<T>& g) {
                   const T* xh = xhat.ptr();
                   const T* pg = gn->value.ptr();
                   if (gn->requires_grad) {
                     T* gg = grad_buffer(*gn).ptr();
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t j = 0; j < c; ++j) gg[j] += g[r * c + j] * xh[r * c + j];
                   }
                   if (bn->requires_grad) {
                     T* gb = grad_buffer(*bn).ptr();
                     for (std::size_t r = 0; r < rows; ++r)
                       K<T>().axpy(c, T(1), g.ptr() + r * c, gb);
                   }
                   if (xn->requires_grad) {
                     T* gx = grad_buffer(*xn).ptr();
                     const T inv_c = T(1) / static_cast<T>(c);
                     for (std::size_t r = 0; r < rows; ++r) {
                       const T* gr = g.ptr() + r * c;
                       const T* xr = xh + r * c;
                       T mean_d = 0, mean_dx = 0;
                       for (std::size_t j = 0; j < c; ++j) {
                         const T d = gr[j] * pg[j];
                         mean_d += d;
                         mean_dx += d * xr[j];
                       }
                       mean_d *= inv_c;
                       mean_dx *= inv_c;
                       T* out = gx + r * c;
                       for (std::size_t j = 0; j < c; ++j)
                         out[j] += rstd[r] * (gr[j] * pg[j] - mean_d - xr[j] * mean_dx);
                     }
                   }
                 });
  }
  return result;
}

template <typename T>
Var<T> gelu(const Var<T>& x) {
  const T inv_sqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  Tensor<T> out(x.shape());
  const T* px = x.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = T(0.5) * px[i] * (T(1) + std::erf(px[i] * inv_sqrt2));
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&x})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {x.handle()}, [xn = x.handle(), inv_sqrt2](const Tensor<T>& g) {
      const T inv_sqrt_2pi = inv_sqrt2 * std::numbers::inv_sqrtpi_v<T>;
      const T* px = xn->value.ptr();
      T* gx = grad_buffer(*xn).ptr();
      for (std::size_t i = 0; i < g.size(); ++i) {
        const T v = px[i];
        const T cdf = T(0.5) * (T(1) + std::erf(v * inv_sqrt2));
        const T pdf = inv_sqrt_2pi * std::exp(T(-0.5) * v * v);
        gx[i] += g[i] * (cdf + v * pdf);
      }
    });
  }
  return result;
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  Tensor<T> out(x.shape());
  const T* px = x.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = px[i] > T(0) ? px[i] : T(0);
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&x})) {
    result.set_requires_grad(true);
    tape->record(result.handle(), {x.handle()}, [xn = x.handle()](const Tensor<T>& g) {
      const T* px = xn->value.ptr();
      T* gx = grad_buffer(*xn).ptr();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (px[i] > T(0)) gx[i] += g[i];
    });
  }
  return result;
}

template <typename T>
Var<T> sqrt(const Var<T>& x) {
  Tensor<T> out(x.shape());
  const T* px = x.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (px[i] < T(0)) fail(ErrorKind::NumericInput, "sqrt of a negative value");
    out[i] = std::sqrt(px[i]);
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&x})) {
    result.set_requires_grad(true);
    std::weak_ptr<Node<T>> self = result.handle();
    tape->record(result.handle(), {x.handle()}, [xn = x.handle(), self](const Tensor<T>& g) {
      const T* y = self.lock()->value.ptr();
      T* gx = grad_buffer(*xn).ptr();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / (T(2) * y[i]);
    });
  }
  return result;
}

template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  if (w.shape().size() != 2 || x.shape().empty() || x.shape().back() != w.shape()[0]) {
    fail(ErrorKind::Dimension,
         "linear: input " + shape_str(x.shape()) + " incompatible with weight " + shape_str(w.shape()));
  }
  const std::size_t in = w.shape()[0];
  const std::size_t outw = w.shape()[1];
  if (b.defined() && b.shape() != Shape{outw}) {
    fail(ErrorKind::Dimension, "linear: bias " + shape_str(b.shape()) + " does not match weight " +
                                   shape_str(w.shape()));
  }
  const std::size_t rows = x.size() / in;
  Shape out_shape = x.shape();
  out_shape.back() = outw;
  Tensor<T> out(out_shape);
  const auto& k = K<T>();
  if (b.defined()) {
    const T* pb = b.value().ptr();
    for (std::size_t r = 0; r < rows; ++r) std::copy(pb, pb + outw, out.ptr() + r * outw);
  }
  k.gemm(rows, outw, in, x.value().ptr(), in, w.value().ptr(), outw, out.ptr(), outw, b.defined());
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&x, &w, &b})) {
    result.set_requires_grad(true);
    Handles<T> inputs{x.handle(), w.handle()};
    if (b.defined()) inputs.push_back(b.handle());
    tape->record(result.handle(), inputs,
                 [xn = x.handle(), wn = w.handle(), bn = b.handle(), rows, in,
                  outw](const Tensor<T>& g) {
                   const auto& k = K<T>();
                   std::vector<T> scratch;
                   if (xn->requires_grad) {
                     scratch.resize(in * outw);
                     transpose2d(wn->value.ptr(), in, outw, scratch.data());
                     k.gemm(rows, in, outw, g.ptr(), outw, scratch.data(), in,
                            grad_buffer(*xn).ptr(), in, true);
                   }
                   if (wn->requires_grad) {
                     scratch.resize(rows * in);
                     transpose2d(xn->value.ptr(), rows, in, scratch.data());
                     k.gemm(in, outw, rows, scratch.data(), rows, g.ptr(), outw,
                            grad_buffer(*wn).ptr(), outw, true);
                   }
                   if (bn && bn->requires_grad) {
                     T* gb = grad_buffer(*bn).ptr();
                     for (std::size_t r = 0; r < rows; ++r) k.axpy(outw, T(1), g.ptr() + r * outw, gb);
                   }
                 });
  }
  return result;
}

template <typename T>
Var<T> l2_normalize(const Var<T>& x, T eps) {
  const std::size_t c = x.shape().empty() ? 1 : x.shape().back();
  const std::size_t rows = x.size() / c;
  Tensor<T> out(x.shape());
  std::vector<T> norms(rows);
  const T* px = x.value().ptr();
  for (std::size_t r = 0; r < rows; ++r) {
    const T nrm = std::sqrt(K<T>().dot(px + r * c, px + r * c, c) + eps);
    norms[r] = nrm;
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = px[r * c + j] / nrm;
  }
  Var<T> result(std::move(out));
  if (auto* tape = recording_tape<T>({&x})) {
    result.set_requires_grad(true);
    std::weak_ptr<Node<T>> self = result.handle();
    tape->record(result.handle(), {x.handle()},
                 [xn = x.handle(), self, norms = std::move(norms), c, rows](const Tensor<T>& g) {
                   const T* y = self.lock()->value.ptr();
                   T* gx = grad_buffer(*xn).ptr();
                   for (std::size_t r = 0; r < rows; ++r) {
                     const T gy = K<T>().dot(g.ptr() + r * c, y + r * c, c);
                     for (std::size_t j = 0; j < c; ++j)
                       gx[r * c + j] += (g[r * c + j] - y[r * c + j] * gy) / norms[r];
                   }
                 });
  }
  return result;
}

template <typename T>
Var<T> dropout(const Var<T>& x, T p, std::mt19937_64& rng) {
  if (p == T(0)) return x;
  if (!(p > T(0) && p < T(1))) fail(ErrorKind::Config, "dropout probability must lie in [0, 1)");
  std::bernoulli_distribution keep(1.0 - static_cast<double>(p));
  const T s = T(1) / (T(1) - p);
  Tensor<T> mask(x.shape());
  for (auto& m : mask.data()) m = keep(rng) ? s : T(0);
  return mul(x, constant(std::move(mask)));
}

#define GAITPT_INSTANTIATE_OPS(T)                                                       \
  template Var<T> add(const Var<T>&, const Var<T>&);                                    \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                    \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                    \
  template Var<T> scale(const Var<T>&, T);                                              \
  template Var<T> add_scalar(const Var<T>&, T);                                         \
  template Var<T> matmul(const Var<T>&, const Var<T>&);                                 \
  template Var<T> permute(const Var<T>&, const std::vector<std::size_t>&);              \
  template Var<T> transpose(const Var<T>&, int, int);                                   \
  template Var<T> reshape(const Var<T>&, Shape);                                        \
  template Var<T> concat(std::span<const Var<T>>, int);                                 \
  template Var<T> slice(const Var<T>&, int, std::size_t, std::size_t);                  \
  template Var<T> index_select(const Var<T>&, int, const std::vector<std::size_t>&);    \
  template Var<T> repeat(const Var<T>&, std::size_t);                                   \
  template Var<T> sum(const Var<T>&);                                                   \
  template Var<T> sum(const Var<T>&, int);                                              \
  template Var<T> mean(const Var<T>&);                                                  \
  template Var<T> mean(const Var<T>&, int);                                             \
  template Var<T> softmax(const Var<T>&, int);                                          \
  template Var<T> layer_norm(const Var<T>&, const Var<T>&, const Var<T>&, T);           \
  template Var<T> gelu(const Var<T>&);                                                  \
  template Var<T> relu(const Var<T>&);                                                  \
  template Var<T> sqrt(const Var<T>&);                                                  \
  template Var<T> linear(const Var<T>&, const Var<T>&, const Var<T>&);                  \
  template Var<T> l2_normalize(const Var<T>&, T);                                       \
  template Var<T> dropout(const Var<T>&, T, std::mt19937_64&);

GAITPT_INSTANTIATE_OPS(float)
GAITPT_INSTANTIATE_OPS(double)

#undef GAITPT_INSTANTIATE_OPS

}  // namespace gaitpt::num
