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

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace sonahunt {

// Tagged 64-bit identifier. Word and definition ids never mix implicitly.
template <class Tag>
struct Id {
  std::uint64_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

using WordId = Id<struct WordIdTag>;
using DefinitionId = Id<struct DefinitionIdTag>;

// ISO-639-1 code such as "et", "en" or "ru".
using LanguageCode = std::string;

inline constexpr const char* kEstonian = "et";

}  // namespace sonahunt

template <class Tag>
struct std::hash<sonahunt::Id<Tag>> {
  std::size_t operator()(sonahunt::Id<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
