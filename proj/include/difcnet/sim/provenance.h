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

#ifndef DIFCNET_SIM_PROVENANCE_H_
#define DIFCNET_SIM_PROVENANCE_H_

#include <string>
#include <vector>

#include "difcnet/core/trace.h"

namespace difcnet::sim {

// One label or tracker propagation: data moved from `from` to `to`.
// Entities are `pid:<host>:<pid>#<gen>`, `file:<host>:<inode>#<gen>`,
// `flow:<5-tuple>` and `flow:<5-tuple>@<switch>` for an admitted flow.
struct ProvenanceEdge {
  SimTime time = 0;
  std::string from;
  std::string to;
  std::string event;
  std::uint32_t tracker = 0;

  friend bool operator==(const ProvenanceEdge&, const ProvenanceEdge&) = default;
};

std::vector<ProvenanceEdge> provenance_export(const std::vector<TraceRecord>& trace);

// Shortest time-respecting path from `from` to `to` (edge times never
// decrease along the path). Empty when unreachable.
std::vector<std::string> provenance_path(const std::vector<ProvenanceEdge>& edges,
                                         const std::string& from, const std::string& to);

// Entity kind and host of `pid:Alice:4#1`, `file:Server1:7#1` or
// `flow:...@S3`, e.g. "pid@Alice", "file@Server1", "flow".
std::string EntityClass(const std::string& entity);

}  // namespace difcnet::sim

#endif  // DIFCNET_SIM_PROVENANCE_H_
