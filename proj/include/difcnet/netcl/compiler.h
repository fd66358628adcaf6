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

#ifndef DIFCNET_NETCL_COMPILER_H_
#define DIFCNET_NETCL_COMPILER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/tag_registry.h"
#include "difcnet/dataplane/switch_config.h"
#include "difcnet/netcl/ast.h"

namespace difcnet::netcl {

// What the compiler needs to know about the network: host addresses and the
// switch each one hangs off, named address sets, and gateway prefixes.
struct Bindings {
  struct Host {
    std::string name;
    Ipv4 ip;
    std::string switch_id;
  };
  struct Gateway {
    std::string name;
    Ipv4Prefix prefix;
    std::string switch_id;
  };

  std::vector<Host> hosts;
  std::vector<Gateway> gateways;
  // Members are host or gateway names.
  std::map<std::string, std::vector<std::string>> sets;
  // Egress ports per switch, for reroute validation. Switches absent from the
  // map are not checked.
  std::map<std::string, std::set<std::uint16_t>> ports;

  const Host* FindHost(std::string_view name) const;
  const Host* FindHost(Ipv4 ip) const;
  const Gateway* FindGateway(std::string_view name) const;
  const Gateway* GatewayFor(Ipv4 ip) const;
  // Switches with at least one host or gateway attached, sorted.
  std::vector<std::string> EndpointSwitches() const;
};

struct CompileOptions {
  // Puts every match entry in the ternary table, as a switch without
  // dedicated exact-match tables would have to.
  bool single_table = false;
  // Places every rule on this switch instead of near its destination.
  std::optional<std::string> collapse_to;
};

struct CompileResult {
  dataplane::DeploymentConfig configs;
  core::TagRegistry registry;
  // Tracker id per (host ip, path), in label_file order.
  std::map<std::pair<Ipv4, std::string>, core::TrackerId> trackers;
  // Table entries contributed by each rule, summed over switches.
  std::vector<std::size_t> entries_per_rule;

  std::size_t total_entries(dataplane::TableKind kind) const;
};

// Registers tags in `registry`: endorse tags as integrity, label_host and
// declassify tags as secrecy. Tags already pinned keep their kind. Throws
// UnknownTag, RegistryError or CompileError.
void RegisterTags(const Program& program, core::TagRegistry& registry);

// Throws UnknownName, UnknownTag, CompileError or PlacementError.
CompileResult Compile(const Program& program, const Bindings& bindings,
                      core::TagRegistry registry = {}, const CompileOptions& options = {});

// Per switch, entries of `next` missing from `prev` are added and entries of
// `prev` missing from `next` are removed. Entries are compared structurally,
// priority included, so deleting a rule renumbers and reinstalls the rules
// after it.
dataplane::UpdatePlan diff_configs(const dataplane::DeploymentConfig& prev,
                                   const dataplane::DeploymentConfig& next);

}  // namespace difcnet::netcl

#endif  // DIFCNET_NETCL_COMPILER_H_
