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

#include "difcnet/sim/provenance.h"

#include <algorithm>
#include <map>
#include <queue>

namespace difcnet::sim {

std::vector<ProvenanceEdge> provenance_export(const std::vector<TraceRecord>& trace) {
  std::vector<ProvenanceEdge> edges;
  for (const auto& r : trace) {
    std::string from = r.Get("from");
    std::string to = r.Get("to");
    if (from.empty() || to.empty()) continue;
    ProvenanceEdge e{r.time, std::move(from), std::move(to), r.event, 0};
    if (std::string t = r.Get("tracker"); !t.empty()) e.tracker = std::stoul(t);
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<std::string> provenance_path(const std::vector<ProvenanceEdge>& edges,
                                         const std::string& from, const std::string& to) {
  std::map<std::string, std::vector<const ProvenanceEdge*>> out;
  for (const auto& e : edges) out[e.from].push_back(&e);
  // Earliest arrival per node, then parent pointers for reconstruction.
  std::map<std::string, SimTime> arrival{{from, 0}};
  std::map<std::string, std::string> parent;
  std::queue<std::string> q;
  q.push(from);
  while (!q.empty()) {
    std::string n = q.front();
    q.pop();
    for (const auto* e : out[n]) {
      if (e->time < arrival[n]) continue;
      auto it = arrival.find(e->to);
      if (it != arrival.end() && it->second <= e->time) continue;
      arrival[e->to] = e->time;
      parent[e->to] = n;
      q.push(e->to);
    }
  }
  if (!arrival.contains(to)) return {};
  std::vector<std::string> path{to};
  while (path.back() != from) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

std::string EntityClass(const std::string& entity) {
  auto colon = entity.find(':');
  std::string kind = entity.substr(0, colon);
  if (kind == "flow") return "flow";
  auto second = entity.find(':', colon + 1);
  return kind + "@" + entity.substr(colon + 1, second - colon - 1);
}

}  // namespace difcnet::sim
