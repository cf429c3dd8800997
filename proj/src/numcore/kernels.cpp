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

#include "gaitpt/numcore/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <type_traits>

#include "gaitpt/error.hpp"
#include "kernels_internal.hpp"

namespace gaitpt::num::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(GAITPT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa default_isa() {
  if (const char* env = std::getenv("GAITPT_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && available(Isa::Avx2)) return Isa::Avx2;
  }
  return available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

namespace {

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{default_isa()};
  return slot;
}

template <typename T>
struct Tables {
  Table<T> scalar = detail::scalar_table<T>();
#if defined(GAITPT_HAVE_AVX2)
  Table<T> avx2 = [] {
    if constexpr (std::is_same_v<T, float>) {
      return detail::avx2_table_f32();
    } else {
      return detail::avx2_table_f64();
    }
  }();
#endif
};

template <typename T>
const Tables<T>& tables() {
  static const Tables<T> t;
  return t;
}

}  // namespace

Isa active_isa() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!available(isa)) {
    fail(ErrorKind::Config, "instruction set " + std::string(to_string(isa)) + " is not available");
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

template <typename T>
const Table<T>& table_for(Isa isa) {
  if (!available(isa)) {
    fail(ErrorKind::Config, "instruction set " + std::string(to_string(isa)) + " is not available");
  }
#if defined(GAITPT_HAVE_AVX2)
  if (isa == Isa::Avx2) return tables<T>().avx2;
#endif
  return tables<T>().scalar;
}

template <typename T>
const Table<T>& active() {
#if defined(GAITPT_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return tables<T>().avx2;
#endif
  return tables<T>().scalar;
}

template const Table<float>& table_for<float>(Isa);
template const Table<double>& table_for<double>(Isa);
template const Table<float>& active<float>();
template const Table<double>& active<double>();

}  // namespace gaitpt::num::kernels
