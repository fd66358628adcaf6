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

#include "difcnet/sim/topology.h"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "difcnet/core/errors.h"

namespace difcnet::sim {
namespace {

std::vector<std::string> Split(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

[[noreturn]] void Fail(int line, const std::string& msg) {
  throw TopologyError("line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Topology Topology::Parse(std::string_view text) {
  Topology t;
  std::map<std::string, std::uint16_t> next_port;
  std::set<std::string> names;
  auto attach = [&](const std::string& sw, int line) -> std::uint16_t {
    if (!t.HasSwitch(sw)) Fail(line, "unknown switch '" + sw + "'");
    return ++next_port[sw];
  };
  auto claim = [&](const std::string& name, int line) {
    if (t.HasSwitch(name) || !names.insert(name).second) {
      Fail(line, "duplicate name '" + name + "'");
    }
  };
  // Trailing "latency <dur>" option shared by several statements.
  auto latency = [&](const std::vector<std::string>& w, std::size_t at, int line) {
    if (w.size() == at) return kDefaultLatency;
    if (w.size() != at + 2 || w[at] != "latency") Fail(line, "expected 'latency <duration>'");
    try {
      return ParseDuration(w[at + 1]);
    } catch (const Error& e) {
      Fail(line, e.what());
    }
  };

  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::vector<std::string> w = Split(raw);
    if (w.empty()) continue;
    const std::string& kw = w[0];
    try {
      if (kw == "switch") {
        if (w.size() < 2) Fail(line_no, "switch needs at least one id");
        for (std::size_t i = 1; i < w.size(); ++i) {
          claim(w[i], line_no);
          t.switches.push_back(w[i]);
        }
      } else if (kw == "link") {
        if (w.size() < 3) Fail(line_no, "usage: link <S> <S> [latency <dur>]");
        if (w[1] == w[2]) Fail(line_no, "self link on " + w[1]);
        Link l{w[1], w[2], attach(w[1], line_no), attach(w[2], line_no), latency(w, 3, line_no)};
        t.links.push_back(l);
      } else if (kw == "host" || kw == "attacker" || kw == "gateway") {
        if (w.size() < 5 || w[3] != "switch") {
          Fail(line_no, "usage: " + kw + " <name> <address> switch <S> [latency <dur>]");
        }
        Endpoint e;
        e.kind = kw == "host"       ? EndpointKind::kHost
                 : kw == "attacker" ? EndpointKind::kAttacker
                                    : EndpointKind::kGateway;
        e.name = w[1];
        claim(e.name, line_no);
        if (e.kind == EndpointKind::kGateway) {
          e.prefix = Ipv4Prefix::Parse(w[2]);
          e.ip = Ipv4(e.prefix.network.value() + 1);
        } else {
          e.ip = Ipv4::Parse(w[2]);
          e.prefix = {e.ip, 32};
        }
        for (const auto& other : t.endpoints) {
          if (other.ip == e.ip) Fail(line_no, "address " + e.ip.ToString() + " used twice");
        }
        e.switch_id = w[4];
        e.port = attach(e.switch_id, line_no);
        e.latency = latency(w, 5, line_no);
        if (e.kind == EndpointKind::kAttacker && t.Attacker()) {
          Fail(line_no, "only one attacker is supported");
        }
        t.endpoints.push_back(e);
      } else if (kw == "set") {
        if (w.size() < 3) Fail(line_no, "usage: set <name> <member>...");
        claim(w[1], line_no);
        for (std::size_t i = 2; i < w.size(); ++i) {
          const Endpoint* m = t.Find(w[i]);
          if (!m) Fail(line_no, "set member '" + w[i] + "' is not declared");
          t.sets[w[1]].push_back(w[i]);
        }
      } else if (kw == "firewall") {
        if (w.size() != 7 || (w[2] != "allow" && w[2] != "deny") || w[3] != "src" ||
            w[5] != "dst") {
          Fail(line_no, "usage: firewall <S> allow|deny src <addr> dst <addr>");
        }
        if (!t.HasSwitch(w[1])) Fail(line_no, "unknown switch '" + w[1] + "'");
        FirewallRule r{w[1], w[2] == "allow", w[4], w[6]};
        t.Expand(r.src);
        t.Expand(r.dst);
        t.firewall.push_back(r);
      } else {
        Fail(line_no, "unknown statement '" + kw + "'");
      }
    } catch (const TopologyError&) {
      throw;
    } catch (const Error& e) {
      Fail(line_no, e.what());
    }
  }
  if (t.switches.empty()) throw TopologyError("no switches declared");
  t.BuildNextHops();
  return t;
}

Topology Topology::Load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw TopologyError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return Parse(ss.str());
  } catch (const TopologyError& e) {
    throw TopologyError(path + ": " + e.what());
  }
}

void Topology::BuildNextHops() {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& l : links) {
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  for (const auto& target : switches) {
    // BFS outward from the target; each switch's parent is its next hop.
    std::map<std::string, std::string> parent;
    std::deque<std::string> q{target};
    parent[target] = target;
    while (!q.empty()) {
      std::string s = q.front();
      q.pop_front();
      for (const auto& n : adj[s]) {
        if (parent.emplace(n, s).second) q.push_back(n);
      }
    }
    if (parent.size() != switches.size()) {
      throw TopologyError("switch graph is not connected (from " + target + ")");
    }
    for (const auto& [s, p] : parent) next_hop_[s][target] = p;
  }
}

const Topology::Endpoint* Topology::Find(std::string_view name) const {
  for (const auto& e : endpoints) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const Topology::Endpoint* Topology::FindByIp(Ipv4 ip) const {
  for (const auto& e : endpoints) {
    if (e.kind != EndpointKind::kGateway && e.ip == ip) return &e;
  }
  for (const auto& e : endpoints) {
    if (e.kind == EndpointKind::kGateway && e.prefix.Contains(ip)) return &e;
  }
  return nullptr;
}

const Topology::Endpoint& Topology::Get(std::string_view name) const {
  const Endpoint* e = Find(name);
  if (!e) throw TopologyError("unknown endpoint '" + std::string(name) + "'");
  return *e;
}

std::vector<std::string> Topology::Hosts() const {
  std::vector<std::string> out;
  for (const auto& e : endpoints) {
    if (e.kind == EndpointKind::kHost) out.push_back(e.name);
  }
  return out;
}

const Topology::Endpoint* Topology::Attacker() const {
  for (const auto& e : endpoints) {
    if (e.kind == EndpointKind::kAttacker) return &e;
  }
  return nullptr;
}

bool Topology::HasSwitch(std::string_view id) const {
  return std::find(switches.begin(), switches.end(), id) != switches.end();
}

std::vector<std::string> Topology::SwitchPath(const std::string& from,
                                              const std::string& to) const {
  std::vector<std::string> path{from};
  while (path.back() != to) path.push_back(next_hop_.at(path.back()).at(to));
  return path;
}

std::vector<std::string> Topology::PathSwitches(const std::string& from,
                                                const std::string& to) const {
  return SwitchPath(Get(from).switch_id, Get(to).switch_id);
}

std::vector<std::pair<Ipv4Prefix, std::uint16_t>> Topology::Routes(
    const std::string& switch_id) const {
  std::vector<std::pair<Ipv4Prefix, std::uint16_t>> out;
  for (const auto& e : endpoints) {
    if (e.switch_id == switch_id) {
      out.emplace_back(e.prefix, e.port);
      continue;
    }
    const std::string& hop = next_hop_.at(switch_id).at(e.switch_id);
    for (const auto& l : links) {
      if (l.a == switch_id && l.b == hop) {
        out.emplace_back(e.prefix, l.port_a);
        break;
      }
      if (l.b == switch_id && l.a == hop) {
        out.emplace_back(e.prefix, l.port_b);
        break;
      }
    }
  }
  return out;
}

std::optional<Topology::PortPeer> Topology::Peer(const std::string& switch_id,
                                                 std::uint16_t port) const {
  for (const auto& e : endpoints) {
    if (e.switch_id == switch_id && e.port == port) return PortPeer{e.name, false, 0, e.latency};
  }
  for (const auto& l : links) {
    if (l.a == switch_id && l.port_a == port) return PortPeer{l.b, true, l.port_b, l.latency};
    if (l.b == switch_id && l.port_b == port) return PortPeer{l.a, true, l.port_a, l.latency};
  }
  return std::nullopt;
}

std::vector<std::string> Topology::HostAttachedSwitches() const {
  std::vector<std::string> out;
  for (const auto& s : switches) {
    for (const auto& e : endpoints) {
      if (e.kind == EndpointKind::kHost && e.switch_id == s) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

std::vector<Ipv4Prefix> Topology::Expand(const std::string& addr) const {
  if (addr == "any") return {Ipv4Prefix{Ipv4(0), 0}};
  if (auto it = sets.find(addr); it != sets.end()) {
    std::vector<Ipv4Prefix> out;
    for (const auto& m : it->second) out.push_back(Get(m).prefix);
    return out;
  }
  if (const Endpoint* e = Find(addr)) return {e->prefix};
  if (addr.find('/') != std::string::npos) return {Ipv4Prefix::Parse(addr)};
  if (auto ip = Ipv4::TryParse(addr)) return {Ipv4Prefix{*ip, 32}};
  throw TopologyError("unknown address '" + addr + "'");
}

bool Topology::FirewallAdmits(const std::string& src, const std::string& dst) const {
  const Endpoint& s = Get(src);
  const Endpoint& d = Get(dst);
  auto covers = [&](const std::string& addr, Ipv4 ip) {
    for (const auto& p : Expand(addr)) {
      if (p.Contains(ip)) return true;
    }
    return false;
  };
  for (const auto& sw : SwitchPath(s.switch_id, d.switch_id)) {
    for (const auto& r : firewall) {
      if (r.switch_id != sw || !covers(r.src, s.ip) || !covers(r.dst, d.ip)) continue;
      if (!r.allow) return false;
      break;
    }
  }
  return true;
}

netcl::Bindings Topology::ToBindings() const {
  netcl::Bindings b;
  for (const auto& e : endpoints) {
    if (e.kind == EndpointKind::kGateway) {
      b.gateways.push_back({e.name, e.prefix, e.switch_id});
    } else {
      b.hosts.push_back({e.name, e.ip, e.switch_id});
    }
  }
  b.sets = sets;
  for (const auto& s : switches) {
    auto& ports = b.ports[s];
    for (const auto& [prefix, port] : Routes(s)) ports.insert(port);
    for (const auto& l : links) {
      if (l.a == s) ports.insert(l.port_a);
      if (l.b == s) ports.insert(l.port_b);
    }
  }
  return b;
}

}  // namespace difcnet::sim
