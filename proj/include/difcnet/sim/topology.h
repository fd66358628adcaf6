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

#ifndef DIFCNET_SIM_TOPOLOGY_H_
#define DIFCNET_SIM_TOPOLOGY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/time.h"
#include "difcnet/netcl/compiler.h"

namespace difcnet::sim {

// Text format, one statement per line, `#` comments:
//
//   switch S1 S2 ...
//   link <S> <S> [latency <dur>]
//   host <name> <ip> switch <S> [latency <dur>]
//   attacker <name> <ip> switch <S> [latency <dur>]
//   gateway <name> <cidr> switch <S> [latency <dur>]
//   set <name> <member>...
//   firewall <S> allow|deny src <addr> dst <addr>
//
// Switch ports are numbered from 1 per switch in declaration order of the
// statements that attach to it. Firewall rules are evaluated per switch in
// order; the first match decides and unmatched traffic is allowed.
struct Topology {
  enum class EndpointKind { kHost, kAttacker, kGateway };

  struct Endpoint {
    EndpointKind kind = EndpointKind::kHost;
    std::string name;
    Ipv4 ip;                   // gateways: the first address after the base
    Ipv4Prefix prefix;         // /32 for hosts
    std::string switch_id;
    std::uint16_t port = 0;
    SimTime latency = 0;
  };

  struct Link {
    std::string a;
    std::string b;
    std::uint16_t port_a = 0;
    std::uint16_t port_b = 0;
    SimTime latency = 0;
  };

  struct FirewallRule {
    std::string switch_id;
    bool allow = true;
    std::string src;  // "any", a name or an address
    std::string dst;
  };

  std::vector<std::string> switches;
  std::vector<Endpoint> endpoints;
  std::vector<Link> links;
  std::map<std::string, std::vector<std::string>> sets;
  std::vector<FirewallRule> firewall;

  static inline const SimTime kDefaultLatency = Micros(10);

  // Throws TopologyError.
  static Topology Parse(std::string_view text);
  static Topology Load(const std::string& path);

  const Endpoint* Find(std::string_view name) const;
  const Endpoint* FindByIp(Ipv4 ip) const;
  const Endpoint& Get(std::string_view name) const;
  // Hosts in declaration order; attackers and gateways excluded.
  std::vector<std::string> Hosts() const;
  const Endpoint* Attacker() const;
  bool HasSwitch(std::string_view id) const;

  // Switch ids on the forwarding path between two endpoints, inclusive.
  std::vector<std::string> PathSwitches(const std::string& from, const std::string& to) const;
  // Egress port per destination prefix for one switch.
  std::vector<std::pair<Ipv4Prefix, std::uint16_t>> Routes(const std::string& switch_id) const;
  // Neighbor reached through a switch port: a switch id or an endpoint name.
  struct PortPeer {
    std::string node;
    bool is_switch = false;
    std::uint16_t peer_port = 0;
    SimTime latency = 0;
  };
  std::optional<PortPeer> Peer(const std::string& switch_id, std::uint16_t port) const;
  std::vector<std::string> HostAttachedSwitches() const;

  // Expands a name, set or address to prefixes. Throws TopologyError.
  std::vector<Ipv4Prefix> Expand(const std::string& addr) const;
  // True when the firewall lets `src` open a connection to `dst`.
  bool FirewallAdmits(const std::string& src, const std::string& dst) const;

  netcl::Bindings ToBindings() const;

 private:
  void BuildNextHops();
  std::vector<std::string> SwitchPath(const std::string& from, const std::string& to) const;

  // next_hop_[a][b]: neighbor of switch a on the shortest path to b.
  std::map<std::string, std::map<std::string, std::string>> next_hop_;
};

}  // namespace difcnet::sim

#endif  // DIFCNET_SIM_TOPOLOGY_H_
