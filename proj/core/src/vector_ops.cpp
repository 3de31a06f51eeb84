// Copyright 2026 The Sonahunt Authors.
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

#include "sonahunt/vector_ops.hpp"

#include <cstddef>

namespace sonahunt {

#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
#define SONAHUNT_TARGET_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define SONAHUNT_TARGET_CLONES
#endif

SONAHUNT_TARGET_CLONES
float dot(std::span<const float> a, std::span<const float> b) noexcept {
  constexpr std::size_t kLanes = 16;
  const std::size_t n = a.size();
  const float* x = a.data();
  const float* y = b.data();
  float acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) acc[j] += x[i + j] * y[i + j];
  }
  float tail = 0.0f;
  for (; i < n; ++i) tail += x[i] * y[i];
  for (std::size_t width = kLanes / 2; width > 0; width /= 2) {
    for (std::size_t j = 0; j < width; ++j) acc[j] += acc[j + width];
  }
  return acc[0] + tail;
}

}  // namespace sonahunt
