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

#include "gaitpt/numcore/kernels.hpp"

namespace gaitpt::num::kernels::detail {

template <typename T>
Table<T> scalar_table();

#if defined(GAITPT_HAVE_AVX2)
Table<float> avx2_table_f32();
Table<double> avx2_table_f64();
#endif

}  // namespace gaitpt::num::kernels::detail
