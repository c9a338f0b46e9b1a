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

#ifndef IDIOMALIGN_MANIFEST_HPP_
#define IDIOMALIGN_MANIFEST_HPP_

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <optional>
#include <string>

#include <json.hpp>

#include "idiomalign/text.hpp"

namespace idiomalign {

inline constexpr std::string_view kVersion = "0.3.0";

inline std::string format_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string utc_now_iso() {
  return format_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
}

// Timestamp written into records (not manifests). Honors SOURCE_DATE_EPOCH so
// reruns can produce byte-identical artifacts.
inline std::string record_timestamp() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0') return format_utc(static_cast<std::time_t>(v));
  }
  return utc_now_iso();
}

// Digest of a JSON document. nlohmann::json objects keep keys sorted, so
// dump() is canonical.
inline std::string json_digest(const nlohmann::json& j) { return text::hex64(text::fnv1a64(j.dump())); }

}  // namespace idiomalign

#endif  // IDIOMALIGN_MANIFEST_HPP_
