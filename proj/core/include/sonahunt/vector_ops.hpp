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

#pragma once

#include <span>

namespace sonahunt {

// Inner product. Every similarity in the library goes through this function,
// so exact and approximate search agree bit-for-bit. The summation order is
// fixed (16 interleaved lanes, then a pairwise reduction) and does not depend
// on which instruction set the runtime dispatcher picks.
float dot(std::span<const float> a, std::span<const float> b) noexcept;

}  // namespace sonahunt
