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

#include "difcnet/core/trace.h"

#include <charconv>
#include <sstream>

#include "difcnet/core/errors.h"

namespace difcnet {

std::string TraceRecord::Get(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  return {};
}

std::string TraceRecord::ToString() const {
  std::string out = "t=" + std::to_string(time) + " node=" + node + " event=" + event;
  for (const auto& [k, v] : fields) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

TraceRecord ParseTraceRecord(std::string_view line) {
  TraceRecord rec;
  std::istringstream in{std::string(line)};
  std::string word;
  int index = 0;
  while (in >> word) {
    std::size_t eq = word.find('=');
    if (eq == std::string::npos) {
      throw Error("TraceError", "field without `=` in `" + std::string(line) + "`");
    }
    std::string key = word.substr(0, eq);
    std::string value = word.substr(eq + 1);
    if (index == 0) {
      if (key != "t") throw Error("TraceError", "record must start with t=");
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), rec.time);
      if (ec != std::errc()) throw Error("TraceError", "bad timestamp " + value);
    } else if (index == 1 && key == "node") {
      rec.node = value;
    } else if (index == 2 && key == "event") {
      rec.event = value;
    } else {
      rec.fields.emplace_back(key, value);
    }
    ++index;
  }
  return rec;
}

}  // namespace difcnet
