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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gaitpt/numcore/kernels.hpp"

using namespace gaitpt::num::kernels;

namespace {

template <typename T>
std::vector<T> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(u(rng));
  return v;
}

template <typename T>
T tolerance();
template <>
float tolerance<float>() { return 2e-5f; }
template <>
double tolerance<double>() { return 1e-12; }

template <typename T>
void check_close(const std::vector<T>& a, const std::vector<T>& b, T scale = T(1)) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= tolerance<T>() * scale * std::max<T>(T(1), std::abs(b[i])));
  }
}

template <typename T>
void equivalence_suite(const Table<T>& simd) {
  const auto& ref = table_for<T>(Isa::Scalar);
  std::mt19937_64 rng(1234);

  for (std::size_t m : {1u, 3u, 4u, 5u, 9u, 33u})
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 16u, 17u, 40u})
      for (std::size_t k : {1u, 2u, 8u, 31u}) {
        CAPTURE(m);
        CAPTURE(n);
        CAPTURE(k);
        // strided views: leading dimensions larger than the logical extents
        const std::size_t lda = k + 2, ldb = n + 3, ldc = n + 1;
        auto a = random_vec<T>(m * lda, rng);
        auto b = random_vec<T>(k * ldb, rng);
        auto c0 = random_vec<T>(m * ldc, rng);
        for (bool acc : {false, true}) {
          auto cr = c0, cs = c0;
          ref.gemm(m, n, k, a.data(), lda, b.data(), ldb, cr.data(), ldc, acc);
          simd.gemm(m, n, k, a.data(), lda, b.data(), ldb, cs.data(), ldc, acc);
          check_close(cs, cr, static_cast<T>(k));
        }
      }

  for (std::size_t n : {0u, 1u, 5u, 8u, 15u, 16u, 17u, 100u, 1027u}) {
    CAPTURE(n);
    auto x = random_vec<T>(n, rng);
    auto y = random_vec<T>(n, rng);
    CHECK(std::abs(simd.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <=
          tolerance<T>() * static_cast<T>(n + 1));
    CHECK(std::abs(simd.sum(x.data(), n) - ref.sum(x.data(), n)) <=
          tolerance<T>() * static_cast<T>(n + 1));

    auto yr = y, ys = y;
    ref.axpy(n, T(0.75), x.data(), yr.data());
    simd.axpy(n, T(0.75), x.data(), ys.data());
    check_close(ys, yr);

    std::vector<T> outr(n), outs(n);
    ref.add(n, x.data(), y.data(), outr.data());
    simd.add(n, x.data(), y.data(), outs.data());
    CHECK(outs == outr);
    ref.mul(n, x.data(), y.data(), outr.data());
    simd.mul(n, x.data(), y.data(), outs.data());
    CHECK(outs == outr);

    AdamwCoeffs<T> c{T(1e-3), T(0.9), T(0.999), T(1e-8), T(1e-2), T(0.19), T(0.002997)};
    auto pr = x, ps = x;
    auto mr = random_vec<T>(n, rng);
    auto vr = random_vec<T>(n, rng);
    for (auto& v : vr) v = std::abs(v);
    auto ms = mr, vs = vr;
    ref.adamw(n, pr.data(), y.data(), mr.data(), vr.data(), c);
    simd.adamw(n, ps.data(), y.data(), ms.data(), vs.data(), c);
    check_close(ps, pr);
    check_close(ms, mr);
    check_close(vs, vr);
  }
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(available(Isa::Scalar));
  CHECK(to_string(Isa::Scalar) == "scalar");
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!available(Isa::Avx2)) {
    MESSAGE("AVX2 unavailable on this host; equivalence suite skipped");
    return;
  }
  SUBCASE("float") { equivalence_suite<float>(table_for<float>(Isa::Avx2)); }
  SUBCASE("double") { equivalence_suite<double>(table_for<double>(Isa::Avx2)); }
}

TEST_CASE("active table can be switched") {
  const Isa before = active_isa();
  set_active_isa(Isa::Scalar);
  CHECK(&active<float>() == &table_for<float>(Isa::Scalar));
  set_active_isa(before);
  CHECK(active_isa() == before);
}
