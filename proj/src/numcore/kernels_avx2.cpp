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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include <cstdint>

#include "kernels_internal.hpp"

namespace gaitpt::num::kernels::detail {
namespace {

template <typename T>
struct Vec;

template <>
struct Vec<float> {
  using reg = __m256;
  static constexpr std::size_t width = 8;
  static reg zero() { return _mm256_setzero_ps(); }
  static reg set1(float x) { return _mm256_set1_ps(x); }
  static reg load(const float* p) { return _mm256_loadu_ps(p); }
  static void store(float* p, reg x) { _mm256_storeu_ps(p, x); }
  static reg mload(const float* p, __m256i mask) { return _mm256_maskload_ps(p, mask); }
  static void mstore(float* p, __m256i mask, reg x) { _mm256_maskstore_ps(p, mask, x); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_ps(a, b, c); }
  static reg add(reg a, reg b) { return _mm256_add_ps(a, b); }
  static reg sub(reg a, reg b) { return _mm256_sub_ps(a, b); }
  static reg mul(reg a, reg b) { return _mm256_mul_ps(a, b); }
  static reg div(reg a, reg b) { return _mm256_div_ps(a, b); }
  static reg sqrt(reg a) { return _mm256_sqrt_ps(a); }
  static __m256i mask(std::size_t rem) {
    alignas(32) std::int32_t m[8];
    for (std::size_t i = 0; i < 8; ++i) m[i] = i < rem ? -1 : 0;
    return _mm256_load_si256(reinterpret_cast<const __m256i*>(m));
  }
  static float hsum(reg x) {
    __m128 lo = _mm256_castps256_ps128(x);
    __m128 hi = _mm256_extractf128_ps(x, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehdup_ps(lo);
    lo = _mm_add_ps(lo, sh);
    sh = _mm_movehl_ps(sh, lo);
    lo = _mm_add_ss(lo, sh);
    return _mm_cvtss_f32(lo);
  }
};

template <>
struct Vec<double> {
  using reg = __m256d;
  static constexpr std::size_t width = 4;
  static reg zero() { return _mm256_setzero_pd(); }
  static reg set1(double x) { return _mm256_set1_pd(x); }
  static reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, reg x) { _mm256_storeu_pd(p, x); }
  static reg mload(const double* p, __m256i mask) { return _mm256_maskload_pd(p, mask); }
  static void mstore(double* p, __m256i mask, reg x) { _mm256_maskstore_pd(p, mask, x); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
  static reg add(reg a, reg b) { return _mm256_add_pd(a, b); }
  static reg sub(reg a, reg b) { return _mm256_sub_pd(a, b); }
  static reg mul(reg a, reg b) { return _mm256_mul_pd(a, b); }
  static reg div(reg a, reg b) { return _mm256_div_pd(a, b); }
  static reg sqrt(reg a) { return _mm256_sqrt_pd(a); }
  static __m256i mask(std::size_t rem) {
    alignas(32) std::int64_t m[4];
    for (std::size_t i = 0; i < 4; ++i) m[i] = i < rem ? -1 : 0;
    return _mm256_load_si256(reinterpret_cast<const __m256i*>(m));
  }
  static double hsum(reg x) {
    __m128d lo = _mm256_castpd256_pd128(x);
    __m128d hi = _mm256_extractf128_pd(x, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
  }
};

// R rows of A against NV vector-widths of B; the last vector is masked when
// Masked is set.
template <typename T, int R, int NV, bool Masked>
inline void micro(std::size_t k, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
                  std::size_t ldc, bool accumulate, __m256i mask) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  typename V::reg acc[R][NV];
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < NV; ++v) acc[r][v] = V::zero();

  for (std::size_t p = 0; p < k; ++p) {
    const T* brow = b + p * ldb;
    typename V::reg bv[NV];
    for (int v = 0; v < NV; ++v) {
      if constexpr (Masked) {
        bv[v] = (v == NV - 1) ? V::mload(brow + v * W, mask) : V::load(brow + v * W);
      } else {
        bv[v] = V::load(brow + v * W);
      }
    }
    for (int r = 0; r < R; ++r) {
      const auto av = V::set1(a[r * lda + p]);
      for (int v = 0; v < NV; ++v) acc[r][v] = V::fmadd(av, bv[v], acc[r][v]);
    }
  }

  for (int r = 0; r < R; ++r) {
    T* crow = c + r * ldc;
    for (int v = 0; v < NV; ++v) {
      const bool masked_lane = Masked && v == NV - 1;
      auto out = acc[r][v];
      if (accumulate) {
        out = V::add(out, masked_lane ? V::mload(crow + v * W, mask) : V::load(crow + v * W));
      }
      if (masked_lane) {
        V::mstore(crow + v * W, mask, out);
      } else {
        V::store(crow + v * W, out);
      }
    }
  }
}

template <typename T, int R>
inline void row_block(std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b,
                      std::size_t ldb, T* c, std::size_t ldc, bool accumulate) {
  constexpr std::size_t W = Vec<T>::width;
  const __m256i none = _mm256_setzero_si256();
  std::size_t j = 0;
  for (; j + 2 * W <= n; j += 2 * W) {
    micro<T, R, 2, false>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, none);
  }
  if (j + W <= n) {
    micro<T, R, 1, false>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, none);
    j += W;
  }
  if (j < n) {
    micro<T, R, 1, true>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, Vec<T>::mask(n - j));
  }
}

template <typename T>
void gemm(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b,
          std::size_t ldb, T* c, std::size_t ldc, bool accumulate) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) row_block<T, 4>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc, accumulate);
  switch (m - i) {
    case 3: row_block<T, 3>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc, accumulate); break;
    case 2: row_block<T, 2>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc, accumulate); break;
    case 1: row_block<T, 1>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc, accumulate); break;
    default: break;
  }
}

template <typename T>
T dot(const T* x, const T* y, std::size_t n) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  auto acc0 = V::zero();
  auto acc1 = V::zero();
  std::size_t i = 0;
  for (; i + 2 * W <= n; i += 2 * W) {
    acc0 = V::fmadd(V::load(x + i), V::load(y + i), acc0);
    acc1 = V::fmadd(V::load(x + i + W), V::load(y + i + W), acc1);
  }
  for (; i + W <= n; i += W) acc0 = V::fmadd(V::load(x + i), V::load(y + i), acc0);
  T s = V::hsum(V::add(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  const auto av = V::set1(alpha);
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(y + i, V::fmadd(av, V::load(x + i), V::load(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void add(std::size_t n, const T* a, const T* b, T* out) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(out + i, V::add(V::load(a + i), V::load(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

template <typename T>
void mul(std::size_t n, const T* a, const T* b, T* out) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(out + i, V::mul(V::load(a + i), V::load(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

template <typename T>
T sum(const T* x, std::size_t n) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  auto acc = V::zero();
  std::size_t i = 0;
  for (; i + W <= n; i += W) acc = V::add(acc, V::load(x + i));
  T s = V::hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

template <typename T>
void adamw(std::size_t n, T* param, const T* grad, T* m, T* v, const AdamwCoeffs<T>& c) {
  using V = Vec<T>;
  constexpr std::size_t W = V::width;
  const auto b1 = V::set1(c.beta1);
  const auto b2 = V::set1(c.beta2);
  const auto nb1 = V::set1(T(1) - c.beta1);
  const auto nb2 = V::set1(T(1) - c.beta2);
  const auto bc1 = V::set1(c.bias_correction1);
  const auto bc2 = V::set1(c.bias_correction2);
  const auto lr = V::set1(c.lr);
  const auto eps = V::set1(c.eps);
  const auto lrwd = V::set1(c.lr * c.weight_decay);
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const auto g = V::load(grad + i);
    const auto mi = V::add(V::mul(b1, V::load(m + i)), V::mul(nb1, g));
    const auto vi = V::add(V::mul(b2, V::load(v + i)), V::mul(V::mul(nb2, g), g));
    V::store(m + i, mi);
    V::store(v + i, vi);
    const auto mhat = V::div(mi, bc1);
    const auto vhat = V::div(vi, bc2);
    const auto theta = V::load(param + i);
    const auto step = V::div(V::mul(lr, mhat), V::add(V::sqrt(vhat), eps));
    V::store(param + i, V::sub(V::sub(theta, step), V::mul(lrwd, theta)));
  }
  for (; i < n; ++i) {
    const T g = grad[i];
    m[i] = c.beta1 * m[i] + (T(1) - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (T(1) - c.beta2) * g * g;
    const T mhat = m[i] / c.bias_correction1;
    const T vhat = v[i] / c.bias_correction2;
    const T theta = param[i];
    param[i] = theta - c.lr * mhat / (std::sqrt(vhat) + c.eps) - c.lr * c.weight_decay * theta;
  }
}

template <typename T>
Table<T> make_table() {
  return Table<T>{&gemm<T>, &dot<T>, &axpy<T>, &add<T>, &mul<T>, &sum<T>, &adamw<T>};
}

}  // namespace

Table<float> avx2_table_f32() { return make_table<float>(); }
Table<double> avx2_table_f64() { return make_table<double>(); }

}  // namespace gaitpt::num::kernels::detail
