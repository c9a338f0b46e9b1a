// Copyright 2026 The idiomalign Authors.
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

#ifndef IDIOMALIGN_LANGUAGE_HPP_
#define IDIOMALIGN_LANGUAGE_HPP_

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "idiomalign/error.hpp"

namespace idiomalign {

struct LanguageInfo {
  std::string_view code;
  std::string_view name;        // English display name used inside prompts
  std::string_view indefinite;  // name with its English article, "an English"
};

inline constexpr std::array<LanguageInfo, 4> kKnownLanguages{{
    {"en", "English", "an English"},
    {"zh", "Chinese", "a Chinese"},
    {"ur", "Urdu", "an Urdu"},
    {"hi", "Hindi", "a Hindi"},
}};

inline std::vector<std::string> default_language_codes() {
  std::vector<std::string> codes;
  for (const auto& l : kKnownLanguages) codes.emplace_back(l.code);
  return codes;
}

inline const LanguageInfo& language_info(std::string_view code) {
  for (const auto& l : kKnownLanguages)
    if (l.code == code) return l;
  throw InputError("unknown language code '" + std::string(code) + "'");
}

inline std::string language_name(std::string_view code) {
  return std::string(language_info(code).name);
}

// A translation direction such as "en-zh".
struct Direction {
  std::string source;
  std::string target;

  std::string str() const { return source + "-" + target; }

  static Direction parse(std::string_view text) {
    const auto dash = text.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 == text.size())
      throw InputError("direction must look like 'en-zh', got '" + std::string(text) + "'");
    Direction d{std::string(text.substr(0, dash)), std::string(text.substr(dash + 1))};
    language_info(d.source);
    language_info(d.target);
    if (d.source == d.target) throw InputError("source and target language must differ");
    return d;
  }

  friend bool operator==(const Direction&, const Direction&) = default;
};

}  // namespace idiomalign

#endif  // IDIOMALIGN_LANGUAGE_HPP_
