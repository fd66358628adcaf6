// Copyright 2026 The difcnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "difcnet/core/time.h"

#include <charconv>

#include "difcnet/core/errors.h"

namespace difcnet {

SimTime ParseDuration(std::string_view text) {
  std::int64_t value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p == text.data() || value < 0) {
    throw Error("DurationError", "bad duration `" + std::string(text) + "`");
  }
  std::string_view unit(p, text.data() + text.size() - p);
  if (unit == "ns") return Nanos(value);
  if (unit == "us") return Micros(value);
  if (unit == "ms") return Millis(value);
  if (unit == "s") return Seconds(value);
  throw Error("DurationError", "bad duration unit in `" + std::string(text) + "`");
}

std::string FormatDuration(SimTime t) {
  if (t != 0 && t % Seconds(1) == 0) return std::to_string(t / Seconds(1)) + "s";
  if (t != 0 && t % Millis(1) == 0) return std::to_string(t / Millis(1)) + "ms";
  if (t != 0 && t % Micros(1) == 0) return std::to_string(t / Micros(1)) + "us";
  return std::to_string(t) + "ns";
}

}  // namespace difcnet
