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

#ifndef DIFCNET_SIM_ANALYSIS_H_
#define DIFCNET_SIM_ANALYSIS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "difcnet/core/label.h"
#include "difcnet/dataplane/tables.h"
#include "difcnet/netcl/compiler.h"
#include "difcnet/sim/topology.h"

namespace difcnet::sim {

// Decides whether a compromised host can open a connection to another host.
class Defense {
 public:
  virtual ~Defense() = default;
  virtual std::string name() const = 0;
  // Label an attacker process inherits by compromising `host`.
  virtual core::Label HostLabel(const std::string& host) const = 0;
  // Label delivered to `dst` when a process carrying `carried` on `src`
  // connects to it, or nothing when the connection is refused.
  virtual std::optional<core::Label> Hop(const std::string& src, const std::string& dst,
                                         const core::Label& carried) const = 0;
};

class FirewallDefense : public Defense {
 public:
  explicit FirewallDefense(const Topology& topology);
  std::string name() const override { return "fw"; }
  core::Label HostLabel(const std::string&) const override { return {}; }
  std::optional<core::Label> Hop(const std::string& src, const std::string& dst,
                                 const core::Label& carried) const override;

 private:
  const Topology& topology_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<bool>> admits_;
};

// Evaluates each hop with the compiled tables of the destination's switch.
class P4ControlDefense : public Defense {
 public:
  P4ControlDefense(const Topology& topology, const netcl::CompileResult& compiled);
  std::string name() const override { return "p4c"; }
  core::Label HostLabel(const std::string& host) const override;
  std::optional<core::Label> Hop(const std::string& src, const std::string& dst,
                                 const core::Label& carried) const override;

 private:
  struct CacheKey {
    core::Label label;
    std::uint32_t src;
    std::uint32_t dst;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheHash {
    std::size_t operator()(const CacheKey& k) const {
      return std::hash<core::Label>{}(k.label) ^ (std::size_t{k.src} << 20) ^ k.dst;
    }
  };

  const Topology& topology_;
  std::map<std::string, dataplane::PolicyTables> tables_;
  std::map<Ipv4, core::Label> host_labels_;
  mutable std::unordered_map<CacheKey, std::optional<core::Label>, CacheHash> cache_;
};

// n! / (n - k)!, saturating at UINT64_MAX.
std::uint64_t Permutations(std::uint64_t n, std::uint64_t k);

// Candidate stepping stones for routes to `target`: every host except the
// target, in declaration order. Attackers and gateways are never candidates.
std::vector<std::string> RouteCandidates(const Topology& topology, const std::string& target);

// Visits every ordered sequence of `step_count` distinct candidates. Returns
// the number visited. Throws ScenarioError for step_count 0 or an unknown target.
std::uint64_t enumerate_routes(const Topology& topology, const std::string& target,
                               unsigned step_count,
                               const std::function<void(const std::vector<std::string>&)>& visit);

struct RouteAnalysis {
  std::string target;
  unsigned step_count = 0;
  std::string defense;
  std::uint64_t total_routes = 0;
  std::uint64_t blocked_routes = 0;
  // Hosts with an admitted path of at most step_count hops to the target.
  std::uint64_t reachable_hosts = 0;

  double coverage() const {
    return total_routes == 0 ? 0.0
                             : static_cast<double>(blocked_routes) /
                                   static_cast<double>(total_routes);
  }
};

struct AnalysisOptions {
  bool routes = true;
  bool reachability = true;
};

// Routes start at the topology's attacker, pass through `step_count` hosts
// and end at the target. A route is blocked when any hop is refused. Labels
// accumulate along a route: each compromised host adds its label.
RouteAnalysis analyze_reachability(const Topology& topology, const Defense& defense,
                                   const std::string& target, unsigned step_count,
                                   const AnalysisOptions& options = {});

// Replaces the topology's firewall with "only the first `allowed` candidates
// may reach the target".
Topology WithAllowList(const Topology& topology, const std::string& target, unsigned allowed);

}  // namespace difcnet::sim

#endif  // DIFCNET_SIM_ANALYSIS_H_
