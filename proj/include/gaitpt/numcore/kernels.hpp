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

// Inner-loop arithmetic kernels. Each instruction set provides a full table;
// the scalar table is the reference every SIMD variant is tested against.

#include <cstddef>
#include <string_view>

namespace gaitpt::num::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

template <typename T>
struct AdamwCoeffs {
  T lr;
  T beta1;
  T beta2;
  T eps;
  T weight_decay;
  T bias_correction1;  // 1 - beta1^t
  T bias_correction2;  // 1 - beta2^t
};

template <typename T>
struct Table {
  /// c[m,n] = a[m,k] * b[k,n], or c += a*b when `accumulate`. Row-major
  /// with explicit leading dimensions.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
               const T* b, std::size_t ldb, T* c, std::size_t ldc, bool accumulate);
  T (*dot)(const T* x, const T* y, std::size_t n);
  /// y += alpha * x
  void (*axpy)(std::size_t n, T alpha, const T* x, T* y);
  void (*add)(std::size_t n, const T* a, const T* b, T* out);
  void (*mul)(std::size_t n, const T* a, const T* b, T* out);
  T (*sum)(const T* x, std::size_t n);
  void (*adamw)(std::size_t n, T* param, const T* grad, T* m, T* v, const AdamwCoeffs<T>& c);
};

bool available(Isa isa) noexcept;

/// Best instruction set supported by this CPU and build, unless overridden by
/// the GAITPT_ISA environment variable ("scalar" or "avx2").
Isa default_isa();
Isa active_isa() noexcept;
/// Switches the table returned by active(); throws if `isa` is unavailable.
void set_active_isa(Isa isa);

template <typename T>
const Table<T>& table_for(Isa isa);

template <typename T>
const Table<T>& active();

}  // namespace gaitpt::num::kernels
