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

#include "difcnet/sim/analysis.h"

#include <limits>

#include "difcnet/core/errors.h"
#include "difcnet/dataplane/header.h"

namespace difcnet::sim {

FirewallDefense::FirewallDefense(const Topology& topology) : topology_(topology) {
  std::vector<std::string> names;
  for (const auto& e : topology.endpoints) {
    if (e.kind != Topology::EndpointKind::kGateway) names.push_back(e.name);
  }
  for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
  admits_.assign(names.size(), std::vector<bool>(names.size(), false));
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (i != j) admits_[i][j] = topology.FirewallAdmits(names[i], names[j]);
    }
  }
}

std::optional<core::Label> FirewallDefense::Hop(const std::string& src, const std::string& dst,
                                                const core::Label& carried) const {
  if (!admits_[index_.at(src)][index_.at(dst)]) return std::nullopt;
  return carried;
}

P4ControlDefense::P4ControlDefense(const Topology& topology,
                                   const netcl::CompileResult& compiled)
    : topology_(topology) {
  for (const auto& [id, config] : compiled.configs) {
    dataplane::PolicyTables& t = tables_[id];
    t.address_sets() = config.address_sets;
    for (dataplane::TableKind k : dataplane::kAllTables) {
      for (const auto& e : config.entries(k)) t.Add(k, e);
    }
    for (const auto& init : config.init_packets) host_labels_[init.host] = init.label;
  }
}

core::Label P4ControlDefense::HostLabel(const std::string& host) const {
  auto it = host_labels_.find(topology_.Get(host).ip);
  return it == host_labels_.end() ? core::Label{} : it->second;
}

std::optional<core::Label> P4ControlDefense::Hop(const std::string& src, const std::string& dst,
                                                 const core::Label& carried) const {
  const auto& s = topology_.Get(src);
  const auto& d = topology_.Get(dst);
  CacheKey key{carried, s.ip.value(), d.ip.value()};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  std::optional<core::Label> out;
  auto t = tables_.find(d.switch_id);
  if (t != tables_.end()) {
    dataplane::FlowKey flow{s.ip, 40000, d.ip, 22, dataplane::Protocol::kTcp};
    dataplane::DifcHeader h = dataplane::apply_privileges({carried, {}}, flow, t->second);
    auto m = dataplane::match_policies(h.tags, h.tracker, flow, t->second);
    if (m.decision.action.forwards()) out = h.tags;
  }
  cache_.emplace(std::move(key), out);
  return out;
}

std::uint64_t Permutations(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t p = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (p > std::numeric_limits<std::uint64_t>::max() / (n - i)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    p *= n - i;
  }
  return p;
}

std::vector<std::string> RouteCandidates(const Topology& topology, const std::string& target) {
  const auto* t = topology.Find(target);
  if (!t || t->kind != Topology::EndpointKind::kHost) {
    throw ScenarioError("route target '" + target + "' is not a host");
  }
  std::vector<std::string> out;
  for (const auto& h : topology.Hosts()) {
    if (h != target) out.push_back(h);
  }
  return out;
}

std::uint64_t enumerate_routes(
    const Topology& topology, const std::string& target, unsigned step_count,
    const std::function<void(const std::vector<std::string>&)>& visit) {
  if (step_count == 0) throw ScenarioError("step count must be at least 1");
  const std::vector<std::string> cand = RouteCandidates(topology, target);
  std::vector<bool> used(cand.size(), false);
  std::vector<std::string> route;
  std::uint64_t count = 0;
  std::function<void()> rec = [&]() {
    if (route.size() == step_count) {
      ++count;
      if (visit) visit(route);
      return;
    }
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      route.push_back(cand[i]);
      rec();
      route.pop_back();
      used[i] = false;
    }
  };
  rec();
  return count;
}

namespace {

class RouteWalker {
 public:
  RouteWalker(const Defense& defense, std::vector<std::string> cand, const std::string& target,
              unsigned steps)
      : defense_(defense), cand_(std::move(cand)), target_(target), steps_(steps) {
    used_.assign(cand_.size(), false);
  }

  // Counts routes refused somewhere. `from` is the node the attacker's
  // process currently runs on; empty means no attacker in the topology.
  std::uint64_t Blocked(const std::string& from, const core::Label& carried, unsigned depth) {
    if (depth == steps_) return defense_.Hop(from, target_, carried) ? 0 : 1;
    std::uint64_t blocked = 0;
    for (std::size_t i = 0; i < cand_.size(); ++i) {
      if (used_[i]) continue;
      std::optional<core::Label> got;
      if (from.empty()) {
        got = core::Label{};
      } else {
        got = defense_.Hop(from, cand_[i], carried);
      }
      if (!got) {
        // Every completion of this prefix is refused at this hop.
        blocked += Permutations(cand_.size() - depth - 1, steps_ - depth - 1);
        continue;
      }
      used_[i] = true;
      blocked += Blocked(cand_[i], core::merge(*got, defense_.HostLabel(cand_[i])), depth + 1);
      used_[i] = false;
    }
    return blocked;
  }

 private:
  const Defense& defense_;
  std::vector<std::string> cand_;
  std::string target_;
  unsigned steps_;
  std::vector<bool> used_;
};

// Depth-first search for an admitted simple path of at most `hops` hops.
bool Reaches(const Defense& defense, const std::vector<std::string>& hosts,
             const std::string& target, const std::string& at, const core::Label& carried,
             unsigned hops, std::vector<bool>& used) {
  if (defense.Hop(at, target, carried)) return true;
  if (hops <= 1) return false;
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    if (used[i]) continue;
    auto got = defense.Hop(at, hosts[i], carried);
    if (!got) continue;
    used[i] = true;
    bool ok = Reaches(defense, hosts, target, hosts[i],
                      core::merge(*got, defense.HostLabel(hosts[i])), hops - 1, used);
    used[i] = false;
    if (ok) return true;
  }
  return false;
}

}  // namespace

RouteAnalysis analyze_reachability(const Topology& topology, const Defense& defense,
                                   const std::string& target, unsigned step_count,
                                   const AnalysisOptions& options) {
  if (step_count == 0) throw ScenarioError("step count must be at least 1");
  RouteAnalysis r;
  r.target = target;
  r.step_count = step_count;
  r.defense = defense.name();
  const std::vector<std::string> cand = RouteCandidates(topology, target);

  if (options.routes) {
    r.total_routes = Permutations(cand.size(), step_count);
    const auto* attacker = topology.Attacker();
    std::string start = attacker ? attacker->name : "";
    core::Label label = attacker ? defense.HostLabel(attacker->name) : core::Label{};
    RouteWalker walker(defense, cand, target, step_count);
    r.blocked_routes = walker.Blocked(start, label, 0);
  }
  if (options.reachability) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
      std::vector<bool> used(cand.size(), false);
      used[i] = true;
      if (Reaches(defense, cand, target, cand[i], defense.HostLabel(cand[i]), step_count, used)) {
        ++r.reachable_hosts;
      }
    }
  }
  return r;
}

Topology WithAllowList(const Topology& topology, const std::string& target, unsigned allowed) {
  std::vector<std::string> cand = RouteCandidates(topology, target);
  if (allowed > cand.size()) {
    throw ScenarioError("allow list of " + std::to_string(allowed) + " exceeds the " +
                        std::to_string(cand.size()) + " candidate hosts");
  }
  Topology t = topology;
  t.firewall.clear();
  const std::string sw = t.Get(target).switch_id;
  for (unsigned i = 0; i < allowed; ++i) t.firewall.push_back({sw, true, cand[i], target});
  t.firewall.push_back({sw, false, "any", target});
  return t;
}

}  // namespace difcnet::sim
