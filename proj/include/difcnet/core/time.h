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

#ifndef DIFCNET_CORE_TIME_H_
#define DIFCNET_CORE_TIME_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace difcnet {

// Simulation clock in integer nanoseconds.
using SimTime = std::int64_t;

constexpr SimTime Nanos(std::int64_t n) { return n; }
constexpr SimTime Micros(std::int64_t n) { return n * 1'000; }
constexpr SimTime Millis(std::int64_t n) { return n * 1'000'000; }
constexpr SimTime Seconds(std::int64_t n) { return n * 1'000'000'000; }

// Accepts `<int>ns|us|ms|s`; throws Error on anything else.
SimTime ParseDuration(std::string_view text);
std::string FormatDuration(SimTime t);

}  // namespace difcnet

#endif  // DIFCNET_CORE_TIME_H_
