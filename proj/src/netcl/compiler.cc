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

#include "difcnet/netcl/compiler.h"

#include <algorithm>
#include <cctype>

#include "difcnet/core/errors.h"
#include "difcnet/netcl/parser.h"

namespace difcnet::netcl {

using dataplane::Action;
using dataplane::ActionKind;
using dataplane::AddressMatch;
using dataplane::AddressSets;
using dataplane::SwitchConfig;
using dataplane::TableEntry;
using dataplane::TableKind;

const Bindings::Host* Bindings::FindHost(std::string_view name) const {
  for (const auto& h : hosts) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

const Bindings::Host* Bindings::FindHost(Ipv4 ip) const {
  for (const auto& h : hosts) {
    if (h.ip == ip) return &h;
  }
  return nullptr;
}

const Bindings::Gateway* Bindings::FindGateway(std::string_view name) const {
  for (const auto& g : gateways) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const Bindings::Gateway* Bindings::GatewayFor(Ipv4 ip) const {
  for (const auto& g : gateways) {
    if (g.prefix.Contains(ip)) return &g;
  }
  return nullptr;
}

std::vector<std::string> Bindings::EndpointSwitches() const {
  std::set<std::string> ids;
  for (const auto& h : hosts) ids.insert(h.switch_id);
  for (const auto& g : gateways) ids.insert(g.switch_id);
  return {ids.begin(), ids.end()};
}

std::size_t CompileResult::total_entries(TableKind kind) const {
  std::size_t n = 0;
  for (const auto& [id, c] : configs) n += c.entries(kind).size();
  return n;
}

namespace {

// An address operand after name resolution.
struct Resolved {
  AddressMatch match;
  std::string set_name;
  std::vector<Ipv4Prefix> prefixes;
  // Switches the addressed endpoints attach to; empty for addresses outside
  // the topology.
  std::set<std::string> switches;
  // Hosts named by the operand, for label_host.
  std::vector<const Bindings::Host*> hosts;
};

class Compiler {
 public:
  Compiler(const Program& program, const Bindings& bindings, core::TagRegistry registry,
           const CompileOptions& options)
      : program_(program), bindings_(bindings), options_(options) {
    result_.registry = std::move(registry);
  }

  CompileResult Run() {
    RegisterTags(program_, result_.registry);
    if (options_.collapse_to) {
      Config(*options_.collapse_to);
    } else {
      for (const auto& id : bindings_.EndpointSwitches()) Config(id);
    }
    AssignTrackers();
    EmitInits();
    result_.entries_per_rule.assign(program_.policies.size(), 0);
    for (std::size_t i = 0; i < program_.policies.size(); ++i) CompileRule(i);
    for (auto& [id, c] : result_.configs) {
      for (TableKind k : dataplane::kAllTables) {
        auto& t = c.entries(k);
        std::sort(t.begin(), t.end(), [](const TableEntry& a, const TableEntry& b) {
          return dataplane::CanonicalKey(a) < dataplane::CanonicalKey(b);
        });
      }
    }
    return std::move(result_);
  }

 private:
  SwitchConfig& Config(const std::string& id) {
    auto& c = result_.configs[id];
    c.switch_id = id;
    return c;
  }

  void AddPrefix(Resolved& r, const std::string& name) {
    if (const auto* h = bindings_.FindHost(name)) {
      r.prefixes.push_back({h->ip, 32});
      r.switches.insert(h->switch_id);
      r.hosts.push_back(h);
    } else if (const auto* g = bindings_.FindGateway(name)) {
      r.prefixes.push_back(g->prefix);
      r.switches.insert(g->switch_id);
    } else {
      throw UnknownName("'" + name + "' is not a host or gateway");
    }
  }

  void AddRef(Resolved& r, const HostRef& ref) {
    if (ref.kind == HostRef::Kind::kIp) {
      r.prefixes.push_back({ref.ip, 32});
      if (const auto* h = bindings_.FindHost(ref.ip)) {
        r.switches.insert(h->switch_id);
        r.hosts.push_back(h);
      } else if (const auto* g = bindings_.GatewayFor(ref.ip)) {
        r.switches.insert(g->switch_id);
      }
      return;
    }
    if (auto it = bindings_.sets.find(ref.name); it != bindings_.sets.end()) {
      for (const auto& m : it->second) AddPrefix(r, m);
      return;
    }
    AddPrefix(r, ref.name);
  }

  Resolved Resolve(const HostRef& ref) {
    Resolved r;
    AddRef(r, ref);
    if (ref.kind == HostRef::Kind::kIp) {
      r.match = AddressMatch::Host(ref.ip);
    } else if (const auto* h = bindings_.FindHost(ref.name);
               h && !bindings_.sets.contains(ref.name)) {
      r.match = AddressMatch::Host(h->ip);
    } else {
      r.set_name = ref.name;
      r.match = AddressMatch::Set(ref.name);
    }
    return r;
  }

  Resolved ResolveValue(const Comparison& c) {
    Resolved r;
    switch (c.value.kind) {
      case Value::Kind::kAny:
        r.match = AddressMatch::Any();
        break;
      case Value::Kind::kHost:
        r = Resolve(c.value.host);
        break;
      case Value::Kind::kHostSet: {
        std::vector<std::string> names;
        for (const auto& h : c.value.hosts) {
          AddRef(r, h);
          names.push_back(h.ToString());
        }
        std::string name = "{";
        for (std::size_t i = 0; i < names.size(); ++i) {
          name += (i ? ", " : "") + names[i];
        }
        r.set_name = name + "}";
        r.match = AddressMatch::Set(r.set_name);
        break;
      }
      default:
        throw CompileError(FieldName(c.field) + " needs an address");
    }
    r.match.negate = c.op == CmpOp::kNeq;
    return r;
  }

  const Bindings::Host& SingleHost(const HostRef& ref, const char* what) {
    const Bindings::Host* h = ref.kind == HostRef::Kind::kIp ? bindings_.FindHost(ref.ip)
                                                           : bindings_.FindHost(ref.name);
    if (!h) {
      if (ref.kind == HostRef::Kind::kName) {
        throw UnknownName(std::string(what) + " names unknown host '" + ref.name + "'");
      }
      throw PlacementError(std::string(what) + " address " + ref.ip.ToString() +
                           " has no attached switch");
    }
    return *h;
  }

  void AssignTrackers() {
    std::uint32_t next = 1;
    for (const auto& d : program_.labelings) {
      if (d.kind != LabelDirective::Kind::kLabelFile) continue;
      const auto& host = SingleHost(d.host, "label_file");
      auto key = std::make_pair(host.ip, d.file_path);
      if (result_.trackers.contains(key)) {
        throw CompileError("file " + d.file_path + "@" + host.name + " labeled twice");
      }
      core::TrackerId id(next++);
      result_.trackers.emplace(key, id);
      Config(InitSwitch(host)).file_inits.push_back({host.ip, d.file_path, id});
    }
  }

  std::string InitSwitch(const Bindings::Host& h) const {
    return options_.collapse_to ? *options_.collapse_to : h.switch_id;
  }

  void EmitInits() {
    for (const auto& d : program_.labelings) {
      if (d.kind != LabelDirective::Kind::kLabelHost) continue;
      core::Label label;
      for (const auto& t : d.tags) label.insert(result_.registry.Get(t));
      Resolved r;
      AddRef(r, d.host);
      if (r.hosts.empty()) {
        if (d.host.kind == HostRef::Kind::kIp) {
          throw PlacementError("label_host address " + d.host.ip.ToString() +
                               " has no attached switch");
        }
        throw UnknownName("label_host target '" + d.host.name + "' contains no hosts");
      }
      for (const auto* h : r.hosts) {
        Config(InitSwitch(*h)).init_packets.push_back({h->ip, label});
      }
    }
  }

  core::TagMask Mask(const std::vector<std::string>& tags) {
    core::TagMask m;
    for (const auto& t : tags) {
      auto id = result_.registry.Find(t);
      if (!id) throw UnknownTag("tag '" + t + "' is not registered");
      m.insert(*id);
    }
    return m;
  }

  Action ConvertAction(const RuleAction& a, std::size_t index) {
    Action out;
    switch (a.kind) {
      case RuleAction::Kind::kDrop:
        out.kind = ActionKind::kDrop;
        break;
      case RuleAction::Kind::kAllow:
        out.kind = ActionKind::kAllow;
        break;
      case RuleAction::Kind::kAlert:
        out.kind = ActionKind::kAlert;
        break;
      case RuleAction::Kind::kReroute:
        out.kind = ActionKind::kReroute;
        out.port = a.port;
        break;
      case RuleAction::Kind::kModify:
        out.kind = ActionKind::kModify;
        if (a.field == "ttl") {
          out.field = dataplane::ModifyField::kTtl;
          bool digits = !a.value.empty() && a.value.size() <= 3 &&
                        std::all_of(a.value.begin(), a.value.end(), ::isdigit);
          if (!digits || std::stoul(a.value) > 255) {
            throw CompileError(RuleName(index) + ": ttl must be in [0, 255]");
          }
          out.value = std::to_string(std::stoul(a.value));
        } else if (a.field == "options") {
          out.field = dataplane::ModifyField::kOptions;
          std::string hex = a.value;
          if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
          std::transform(hex.begin(), hex.end(), hex.begin(), ::tolower);
          if (hex.size() % 2 || hex.size() > 80 ||
              !std::all_of(hex.begin(), hex.end(), ::isxdigit)) {
            throw CompileError(RuleName(index) + ": options must be whole hex bytes, at most 40");
          }
          out.value = hex;
        } else {
          throw CompileError(RuleName(index) + ": modify supports ttl and options, not '" +
                             a.field + "'");
        }
        break;
      case RuleAction::Kind::kDeclassify:
        out.kind = ActionKind::kDeclassify;
        out.tags = Mask(a.tags);
        break;
      case RuleAction::Kind::kEndorse:
        out.kind = ActionKind::kEndorse;
        out.tags = Mask(a.tags);
        break;
    }
    return out;
  }

  static std::string RuleName(std::size_t index) {
    return "rule " + std::to_string(index + 1);
  }

  void CompileRule(std::size_t index) {
    const PolicyRule& rule = program_.policies[index];
    TableEntry e;
    e.priority = Program::PriorityOf(index);
    e.action = ConvertAction(rule.action, index);

    std::map<std::string, std::vector<Ipv4Prefix>> sets;
    std::optional<Resolved> dst;
    for (const auto& c : rule.predicate) {
      switch (c.field) {
        case Field::kSrcIp:
        case Field::kDstIp: {
          Resolved r = ResolveValue(c);
          if (!r.set_name.empty()) sets[r.set_name] = r.prefixes;
          (c.field == Field::kSrcIp ? e.src : e.dst) = r.match;
          if (c.field == Field::kDstIp) dst = std::move(r);
          break;
        }
        case Field::kPktLabel:
          e.label_mask = Mask(c.value.tags);
          e.label_value = e.label_mask;
          break;
        case Field::kTrackerId: {
          const auto& host = SingleHost(c.value.host, "tracker_id");
          auto it = result_.trackers.find({host.ip, c.value.path});
          if (it == result_.trackers.end()) {
            throw UnknownName(RuleName(index) + ": no label_file for " + c.value.path + "@" +
                              host.name);
          }
          e.tracker = it->second;
          e.tracker_negate = c.op == CmpOp::kNeq;
          break;
        }
      }
    }

    TableKind table = TableKind::kExact;
    if (e.action.is_privilege()) {
      table = TableKind::kPrivilege;
    } else if (options_.single_table || rule.uses_contains()) {
      table = TableKind::kTernary;
    } else if (rule.uses_tracker()) {
      table = TableKind::kTracker;
    }

    std::vector<std::string> targets;
    if (options_.collapse_to) {
      targets.push_back(*options_.collapse_to);
    } else if (!dst || dst->match.kind == AddressMatch::Kind::kAny || dst->match.negate) {
      targets = bindings_.EndpointSwitches();
    } else {
      if (dst->switches.empty()) {
        throw PlacementError(RuleName(index) + ": destination " + dst->match.ToString() +
                             " has no attached switch");
      }
      targets.assign(dst->switches.begin(), dst->switches.end());
    }
    if (targets.empty()) throw PlacementError(RuleName(index) + ": topology has no endpoints");

    for (const auto& id : targets) {
      if (e.action.kind == ActionKind::kReroute) {
        auto it = bindings_.ports.find(id);
        if (it != bindings_.ports.end() && !it->second.contains(e.action.port)) {
          throw CompileError(RuleName(index) + ": switch " + id + " has no port " +
                             std::to_string(e.action.port));
        }
      }
      SwitchConfig& c = Config(id);
      c.entries(table).push_back(e);
      for (const auto& [name, prefixes] : sets) c.address_sets[name] = prefixes;
      ++result_.entries_per_rule[index];
    }
  }

  const Program& program_;
  const Bindings& bindings_;
  const CompileOptions& options_;
  CompileResult result_;
};

}  // namespace

void RegisterTags(const Program& program, core::TagRegistry& registry) {
  using core::TagKind;
  for (const auto& r : program.policies) {
    if (r.action.kind != RuleAction::Kind::kEndorse) continue;
    for (const auto& t : r.action.tags) {
      if (auto id = registry.Find(t)) {
        if (registry.Kind(*id) != TagKind::kIntegrity) {
          throw CompileError("endorse tag '" + t + "' is a secrecy tag");
        }
      } else {
        registry.Register(t, TagKind::kIntegrity);
      }
    }
  }
  auto secrecy = [&](const std::string& t) {
    if (!registry.Find(t)) registry.Register(t, TagKind::kSecrecy);
  };
  for (const auto& d : program.labelings) {
    for (const auto& t : d.tags) secrecy(t);
  }
  for (const auto& r : program.policies) {
    if (r.action.kind != RuleAction::Kind::kDeclassify) continue;
    for (const auto& t : r.action.tags) {
      secrecy(t);
      if (registry.Kind(registry.Get(t)) != TagKind::kSecrecy) {
        throw CompileError("declassify tag '" + t + "' is an integrity tag");
      }
    }
  }
  for (const auto& r : program.policies) {
    if (const Comparison* c = r.Find(Field::kPktLabel)) {
      for (const auto& t : c->value.tags) {
        if (!registry.Find(t)) {
          throw UnknownTag("tag '" + t + "' in '" + PrintRule(r) + "' is never assigned");
        }
      }
    }
  }
}

CompileResult Compile(const Program& program, const Bindings& bindings,
                      core::TagRegistry registry, const CompileOptions& options) {
  return Compiler(program, bindings, std::move(registry), options).Run();
}

dataplane::UpdatePlan diff_configs(const dataplane::DeploymentConfig& prev,
                                   const dataplane::DeploymentConfig& next) {
  dataplane::UpdatePlan plan;
  std::set<std::string> ids;
  for (const auto& [id, c] : prev) ids.insert(id);
  for (const auto& [id, c] : next) ids.insert(id);
  static const SwitchConfig kEmpty;

  for (const auto& id : ids) {
    auto pit = prev.find(id);
    auto nit = next.find(id);
    const SwitchConfig& a = pit == prev.end() ? kEmpty : pit->second;
    const SwitchConfig& b = nit == next.end() ? kEmpty : nit->second;
    dataplane::SwitchUpdate u;
    for (TableKind k : dataplane::kAllTables) {
      // Multiset difference keyed by canonical text.
      std::multimap<std::string, const TableEntry*> old_entries;
      for (const auto& e : a.entries(k)) old_entries.emplace(dataplane::CanonicalKey(e), &e);
      for (const auto& e : b.entries(k)) {
        auto it = old_entries.find(dataplane::CanonicalKey(e));
        if (it != old_entries.end()) {
          old_entries.erase(it);
        } else {
          u.adds.push_back({k, e});
        }
      }
      for (const auto& [key, e] : old_entries) u.removes.push_back({k, *e});
    }
    if (a.address_sets != b.address_sets) u.address_sets = b.address_sets;
    if (!u.empty()) plan.switches[id] = std::move(u);
  }
  return plan;
}

}  // namespace difcnet::netcl
