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

#ifndef DIFCNET_CORE_TRACE_H_
#define DIFCNET_CORE_TRACE_H_

#include <string>
#include <utility>
#include <vector>

#include "difcnet/core/time.h"

namespace difcnet {

// One line of the structured event log:
//   t=<ns> node=<id> event=<kind> key=value ...
// Field order is preserved so identical runs render byte-identical logs.
struct TraceRecord {
  SimTime time = 0;
  std::string node;
  std::string event;
  std::vector<std::pair<std::string, std::string>> fields;

  TraceRecord& Add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  // Empty string when absent.
  std::string Get(std::string_view key) const;
  std::string ToString() const;
};

// Inverse of ToString. Values may not contain spaces.
TraceRecord ParseTraceRecord(std::string_view line);

}  // namespace difcnet

#endif  // DIFCNET_CORE_TRACE_H_
