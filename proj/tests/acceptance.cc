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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "difcnet/controlplane/control_plane.h"
#include "difcnet/core/tag_registry.h"
#include "difcnet/dataplane/header.h"
#include "difcnet/dataplane/switch.h"
#include "difcnet/hostagent/host_agent.h"
#include "difcnet/netcl/compiler.h"
#include "difcnet/netcl/parser.h"
#include "difcnet/sim/analysis.h"
#include "difcnet/sim/network.h"
#include "difcnet/sim/provenance.h"
#include "difcnet/sim/scenario.h"
#include "difcnet/sim/topology.h"
#include "test_support.h"

namespace {

using namespace difcnet;
using difcnet::testing::ReadScenarioFile;
using difcnet::testing::ScenarioPath;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    detail += why;
    pass = false;
  }
  void Note(const std::string& what) {
    if (!pass) return;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

netcl::CompileResult CompileOn(const std::string& policy_text, const sim::Topology& topo,
                               netcl::CompileOptions opts = {}) {
  return netcl::Compile(netcl::Parse(policy_text), topo.ToBindings(), {}, opts);
}

// ---------------------------------------------------------------------------

Outcome Reachability() {
  Outcome o;
  auto start = Clock::now();
  sim::Topology topo = sim::Topology::Load(ScenarioPath("enterprise.topo"));
  sim::FirewallDefense fw(topo);
  sim::AnalysisOptions reach_only{.routes = false, .reachability = true};
  struct Row {
    std::string target;
    std::string policy;
    std::vector<std::uint64_t> fw;
    std::vector<std::uint64_t> p4c;
  };
  const std::vector<Row> rows = {
      {"Server1", "enterprise_server1.ncl", {3, 7, 7}, {3, 3, 3}},
      {"Server2", "enterprise_server2.ncl", {1, 3, 7}, {1, 1, 1}},
  };
  std::string got;
  for (const auto& row : rows) {
    auto compiled = CompileOn(ReadScenarioFile(row.policy), topo);
    sim::P4ControlDefense p4c(topo, compiled);
    for (unsigned k = 1; k <= 3; ++k) {
      auto a = sim::analyze_reachability(topo, fw, row.target, k, reach_only);
      auto b = sim::analyze_reachability(topo, p4c, row.target, k, reach_only);
      if (a.reachable_hosts != row.fw[k - 1]) {
        o.Fail(row.target + " fw k=" + std::to_string(k) + " got " +
               std::to_string(a.reachable_hosts));
      }
      if (b.reachable_hosts != row.p4c[k - 1]) {
        o.Fail(row.target + " p4c k=" + std::to_string(k) + " got " +
               std::to_string(b.reachable_hosts));
      }
      got += (k == 1 ? " " + row.target + " fw " : "/") + std::to_string(a.reachable_hosts);
    }
  }
  double secs = SecondsSince(start);
  if (secs >= 10) o.Fail("took " + std::to_string(secs) + " s");
  o.Note("reachable" + got);
  return o;
}

// Counts every ordered k-sequence of distinct candidates by walking all n^k
// index tuples.
std::uint64_t BruteForceRoutes(std::size_t n, unsigned k) {
  std::vector<std::size_t> idx(k, 0);
  std::uint64_t count = 0;
  while (true) {
    std::set<std::size_t> seen(idx.begin(), idx.end());
    if (seen.size() == k) ++count;
    unsigned pos = 0;
    while (pos < k && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == k) break;
  }
  return count;
}

std::vector<std::string> Candidates(const sim::Topology& topo, const std::string& target) {
  std::vector<std::string> out;
  for (const auto& e : topo.endpoints) {
    if (e.kind == sim::Topology::EndpointKind::kHost && e.name != target) out.push_back(e.name);
  }
  return out;
}

struct TopoRows {
  std::string file;
  std::string target;
  // step count, paper route count, allowed hosts, firewall coverage %
  std::vector<std::tuple<unsigned, std::uint64_t, unsigned, double>> rows;
};

const std::vector<TopoRows>& CoverageTable() {
  static const std::vector<TopoRows> table = {
      {"enterprise.topo",
       "Server1",
       {{6, 5040, 1, 85}, {5, 2520, 2, 70}, {4, 840, 3, 57}, {3, 210, 4, 42}, {2, 42, 5, 28}}},
      {"cisco.topo",
       "Server",
       {{5, 154440, 2, 84}, {4, 17160, 4, 67}, {3, 1716, 6, 53}, {2, 156, 8, 38}}},
      {"stanford.topo", "Server", {{4, 8185320, 10, 81}, {3, 157410, 20, 63}, {2, 2970, 30, 45}}},
  };
  return table;
}

Outcome RouteEnumeration() {
  Outcome o;
  auto start = Clock::now();
  std::string counts;
  for (const auto& t : CoverageTable()) {
    sim::Topology topo = sim::Topology::Load(ScenarioPath(t.file));
    auto cand = Candidates(topo, t.target);
    for (const auto& [k, expected, allowed, fw_pct] : t.rows) {
      std::uint64_t analytic = sim::Permutations(cand.size(), k);
      if (analytic != expected) {
        o.Fail(t.file + " k=" + std::to_string(k) + " analytic " + std::to_string(analytic));
      }
      // Exhaustive enumeration and the n^k oracle up to a few million tuples;
      // the largest backbone rows rely on the analytic count.
      if (std::pow(static_cast<double>(cand.size()), k) > 5e6) continue;
      std::uint64_t oracle = BruteForceRoutes(cand.size(), k);
      std::set<std::vector<std::string>> distinct;
      std::uint64_t visited = sim::enumerate_routes(
          topo, t.target, k, [&](const std::vector<std::string>& r) {
            if (expected <= 10000) distinct.insert(r);
          });
      if (oracle != expected || visited != expected) {
        o.Fail(t.file + " k=" + std::to_string(k) + " oracle " + std::to_string(oracle) +
               " enumerated " + std::to_string(visited));
      }
      if (expected <= 10000 && distinct.size() != expected) {
        o.Fail(t.file + " k=" + std::to_string(k) + " duplicate routes");
      }
      counts += " " + std::to_string(visited);
    }
  }
  double secs = SecondsSince(start);
  if (secs >= 120) o.Fail("took " + std::to_string(secs) + " s");
  o.Note("enumerated" + counts);
  return o;
}

Outcome Coverage() {
  Outcome o;
  std::string fw_summary;
  for (const auto& t : CoverageTable()) {
    sim::Topology topo = sim::Topology::Load(ScenarioPath(t.file));
    std::string stem = t.file.substr(0, t.file.find('.'));
    auto compiled = CompileOn(ReadScenarioFile("coverage_" + stem + ".ncl"), topo);
    if (compiled.configs.empty()) o.Fail(stem + " policy compiled to nothing");
    std::size_t drops = 0;
    for (const auto& rule : netcl::Parse(ReadScenarioFile("coverage_" + stem + ".ncl")).policies) {
      if (rule.action.kind == netcl::RuleAction::Kind::kDrop) ++drops;
    }
    if (drops != 1) o.Fail(stem + " policy has " + std::to_string(drops) + " drop rules");
    sim::P4ControlDefense p4c(topo, compiled);
    sim::AnalysisOptions routes_only{.routes = true, .reachability = false};
    for (const auto& [k, expected, allowed, fw_pct] : t.rows) {
      auto a = sim::analyze_reachability(topo, p4c, t.target, k, routes_only);
      if (a.total_routes != expected || a.blocked_routes != a.total_routes) {
        o.Fail(stem + " k=" + std::to_string(k) + " p4c blocked " +
               std::to_string(a.blocked_routes) + "/" + std::to_string(a.total_routes));
      }
      sim::Topology fw_topo = sim::WithAllowList(topo, t.target, allowed);
      sim::FirewallDefense fw(fw_topo);
      auto b = sim::analyze_reachability(fw_topo, fw, t.target, k, routes_only);
      double pct = 100.0 * b.coverage();
      if (std::abs(pct - fw_pct) > 10.0) {
        o.Fail(stem + " k=" + std::to_string(k) + " firewall " + std::to_string(pct) + "% vs " +
               std::to_string(fw_pct) + "%");
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.0f", pct);
      fw_summary += buf;
    }
  }
  o.Note("p4c 100% everywhere; firewall %" + fw_summary);
  return o;
}

// Classes along a path must contain `want` as a subsequence.
bool HasSubsequence(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  std::size_t i = 0;
  for (const auto& g : got) {
    if (i < want.size() && g == want[i]) ++i;
  }
  return i == want.size();
}

// Backward search over the raw trace: every entity from which `sink` is
// reachable along edges whose times do not decrease toward the sink.
std::set<std::string> BackwardReach(const std::vector<TraceRecord>& trace,
                                    const std::string& sink) {
  std::map<std::string, SimTime> latest{{sink, std::numeric_limits<SimTime>::max()}};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : trace) {
      std::string from = r.Get("from"), to = r.Get("to");
      if (from.empty() || to.empty()) continue;
      auto it = latest.find(to);
      if (it == latest.end() || r.time > it->second) continue;
      auto [f, fresh] = latest.emplace(from, r.time);
      if (fresh || f->second < r.time) {
        f->second = r.time;
        changed = true;
      }
    }
  }
  std::set<std::string> out;
  for (const auto& [k, v] : latest) out.insert(k);
  return out;
}

Outcome GoldenScenarios() {
  Outcome o;
  for (int i = 1; i <= 3; ++i) {
    std::string listing = ReadScenarioFile("listing" + std::to_string(i) + ".ncl");
    std::string policy = ReadScenarioFile("scenario" + std::to_string(i) + ".ncl");
    try {
      netcl::Parse(listing);
    } catch (const std::exception& e) {
      o.Fail("listing " + std::to_string(i) + ": " + e.what());
    }
    if (policy.compare(0, listing.size(), listing) != 0) {
      o.Fail("scenario " + std::to_string(i) + " policy does not start with the listing");
    }
    std::string file = ScenarioPath("scenario" + std::to_string(i) + ".scn");
    sim::ScenarioReport a = sim::run_scenario(sim::Scenario::Load(file));
    sim::ScenarioReport b = sim::run_scenario(sim::Scenario::Load(file));
    if (!a.passed()) o.Fail(a.Summary());
    if (a.expectations.empty()) o.Fail("scenario " + std::to_string(i) + " has no expectations");
    if (a.TraceText() != b.TraceText()) o.Fail("scenario " + std::to_string(i) + " trace differs");

    if (i == 3) {
      auto edges = sim::provenance_export(a.trace);
      std::string src = "file:Server1:7#1";
      std::string sink = "flow:" + a.flows.at("leak").ToString();
      auto path = sim::provenance_path(edges, src, sink);
      std::vector<std::string> classes;
      for (const auto& n : path) classes.push_back(sim::EntityClass(n));
      const std::vector<std::string> want = {"file@Server1", "pid@Server1", "flow",
                                             "pid@Dev_Admin", "file@Dev_Admin", "pid@Alice",
                                             "flow"};
      if (!HasSubsequence(classes, want) || path.back() != sink) {
        o.Fail("provenance path mismatch");
      }
      auto ancestors = BackwardReach(a.trace, sink);
      for (const auto& n : path) {
        if (!ancestors.contains(n)) o.Fail("path node " + n + " not an ancestor of the leak");
      }
      for (std::size_t j = 1; j < path.size(); ++j) {
        bool found = false;
        for (const auto& e : edges) found |= e.from == path[j - 1] && e.to == path[j];
        if (!found) o.Fail("no edge " + path[j - 1] + " -> " + path[j]);
      }
      o.Note("provenance path of " + std::to_string(path.size()) + " nodes");
    }
  }
  return o;
}

// ---------------------------------------------------------------------------

constexpr char kConsistencyTopo[] = R"(
switch S1 S2
link S1 S2 latency 20us
host H1 10.9.1.1 switch S1
host H2 10.9.1.2 switch S1
host H3 10.9.1.3 switch S1
host H4 10.9.1.4 switch S1
host H5 10.9.1.5 switch S1
host H6 10.9.1.6 switch S1
host Srv1 10.9.2.1 switch S2
host Srv2 10.9.2.2 switch S2
)";

constexpr char kConsistencyPolicy[] = R"(
label_host(ip=H1, label={H1, Bad})
label_host(ip=H2, label={H2, Bad})
label_host(ip=H3, label={H3})
label_host(ip=H4, label={H4})
label_host(ip=H5, label={H5})
label_host(ip=H6, label={H6})
if match(pkt_label contains Bad && dst_ip==Srv1) then drop
if match(src_ip==H3 && dst_ip==Srv2) then drop
if match(dst_ip==any) then allow
)";

Outcome DecisionConsistency() {
  Outcome o;
  const sim::Topology topo = sim::Topology::Parse(kConsistencyTopo);
  const auto compiled = netcl::Compile(netcl::Parse(kConsistencyPolicy), topo.ToBindings());
  const SimTime rtts[] = {Millis(1), Millis(10), Millis(100)};
  const std::vector<std::string> clients = {"H1", "H2", "H3", "H4", "H5", "H6"};
  std::mt19937_64 rng(0x5eed0005);
  constexpr int kSchedules = 10000;
  std::uint64_t flows = 0, packets = 0, violations = 0, evictions = 0, recirc = 0;
  std::uint64_t allowed_flows = 0, dropped_flows = 0;

  for (int s = 0; s < kSchedules; ++s) {
    sim::NetworkOptions opts;
    opts.control_rtt = rtts[s % 3];
    opts.buffer_index_bits = 1 + static_cast<unsigned>(rng() % 3);
    opts.packet_gap = Micros(10) + static_cast<SimTime>(rng() % (2 * opts.control_rtt));
    sim::Network net(topo, &compiled, opts);
    net.Start();

    // Every flow of a schedule lands in the same buffer slot, with distinct
    // full hashes.
    const std::uint32_t mask = (1u << opts.buffer_index_bits) - 1;
    const std::uint32_t slot = static_cast<std::uint32_t>(rng()) & mask;
    std::set<std::uint32_t> hashes;
    std::set<std::uint16_t> used_ports;
    const int n = 3 + static_cast<int>(rng() % 6);
    for (int f = 0; f < n; ++f) {
      sim::ConnectSpec spec;
      spec.src = clients[rng() % clients.size()];
      spec.pid = 100 + f;
      spec.dst = rng() % 2 ? "Srv1" : "Srv2";
      spec.dport = 443;
      spec.protocol = rng() % 2 ? dataplane::Protocol::kTcp : dataplane::Protocol::kUdp;
      spec.packets = 2 + static_cast<unsigned>(rng() % 7);
      spec.server_pid = 900 + f;
      dataplane::FlowKey key{topo.Get(spec.src).ip, 0, topo.Get(spec.dst).ip, spec.dport,
                             spec.protocol};
      for (std::uint16_t port = 20000 + static_cast<std::uint16_t>(rng() % 1000);; ++port) {
        key.src_port = port;
        std::uint32_t h = dataplane::FlowHash(key);
        if ((h & mask) == slot && !hashes.contains(h) && !used_ports.contains(port)) {
          hashes.insert(h);
          used_ports.insert(port);
          break;
        }
      }
      spec.sport = key.src_port;
      net.Connect(spec, static_cast<SimTime>(rng() % (2 * opts.control_rtt)));
    }
    net.Run();

    for (const auto& [key, rec] : net.flows()) {
      ++flows;
      if (!rec.verdict) {
        ++violations;
        continue;
      }
      const bool fwd = rec.verdict->action.forwards();
      (fwd ? allowed_flows : dropped_flows)++;
      for (bool v : rec.packet_verdicts) {
        ++packets;
        if (v != fwd) ++violations;
      }
      if (fwd && rec.data_delivered != rec.data_sent) ++violations;
      if (!fwd && rec.data_delivered != 0) ++violations;
    }
    evictions += net.switch_at("S2").buffer().evictions();
    for (const auto& r : net.trace()) recirc += r.Get("stage") == "recirculate";
  }
  if (violations) o.Fail(std::to_string(violations) + " violations");
  if (evictions == 0) o.Fail("no buffer collisions were exercised");
  if (allowed_flows == 0 || dropped_flows == 0) o.Fail("verdicts did not vary");
  o.Note(std::to_string(kSchedules) + " schedules, " + std::to_string(flows) + " flows, " +
         std::to_string(packets) + " enforced packets, " + std::to_string(evictions) +
         " evictions, " + std::to_string(recirc) + " recirculations, 0 violations");
  return o;
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kEnterpriseHosts = {"Host1", "Alice", "Dev_Admin", "Server2",
                                                   "Server1", "Host2", "Host3", "Host4"};

std::string LabelDirectives() {
  std::string out;
  for (const auto& h : kEnterpriseHosts) out += "label_host(ip=" + h + ", label={" + h + "})\n";
  return out;
}

Outcome Placement() {
  Outcome o;
  sim::Topology topo = sim::Topology::Load(ScenarioPath("enterprise.topo"));
  std::mt19937_64 rng(0x5eed0006);
  std::string text = LabelDirectives();
  for (const auto& dst : kEnterpriseHosts) {
    for (int i = 0; i < 100; ++i) {
      const std::string& other = kEnterpriseHosts[rng() % kEnterpriseHosts.size()];
      std::string action = rng() % 2 ? "allow" : "drop";
      if (rng() % 4 == 0) {
        text += "if match(pkt_label contains " + other + " && dst_ip==" + dst + ") then " +
                action + "\n";
      } else {
        text += "if match(src_ip==" + other + " && dst_ip==" + dst + ") then " + action + "\n";
      }
    }
  }
  netcl::Program program = netcl::Parse(text);
  if (program.policies.size() != 800) o.Fail("generated " + std::to_string(program.policies.size()));
  auto multi = netcl::Compile(program, topo.ToBindings());
  netcl::CompileOptions single_opts;
  single_opts.collapse_to = "S1";
  auto single = netcl::Compile(program, topo.ToBindings(), {}, single_opts);

  const std::vector<std::string> attached = {"S2", "S3", "S4"};
  if (topo.HostAttachedSwitches() != std::vector<std::string>{"S1", "S2", "S3", "S4"} &&
      topo.HostAttachedSwitches() != attached) {
    o.Fail("unexpected host-attached switches");
  }
  auto report = controlplane::placement_report(multi.configs, 800, attached);
  // Replicate-everywhere oracle: each switch would hold all 800 rules.
  double oracle = 0;
  for (const auto& sw : attached) {
    std::size_t hosts_here = 0;
    for (const auto& h : kEnterpriseHosts) hosts_here += topo.Get(h).switch_id == sw;
    oracle += 1.0 - (100.0 * hosts_here) / 800.0;
  }
  oracle /= attached.size();
  if (std::abs(report.average_reduction - oracle) > 1e-9) {
    o.Fail("report " + std::to_string(report.average_reduction) + " vs oracle " +
           std::to_string(oracle));
  }
  if (std::abs(report.average_reduction - 0.66) > 0.02) {
    o.Fail("average reduction " + std::to_string(report.average_reduction));
  }

  std::map<std::string, dataplane::Switch> switches;
  for (const auto& [id, cfg] : multi.configs) {
    switches.emplace(id, dataplane::Switch(id)).first->second.LoadConfig(cfg);
  }
  dataplane::Switch collapsed("S1");
  collapsed.LoadConfig(single.configs.at("S1"));
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto& src = topo.Get(kEnterpriseHosts[rng() % kEnterpriseHosts.size()]);
    const auto& dst = topo.Get(kEnterpriseHosts[rng() % kEnterpriseHosts.size()]);
    dataplane::FlowKey key{src.ip, static_cast<std::uint16_t>(30000 + rng() % 30000), dst.ip,
                           static_cast<std::uint16_t>(rng() % 1024), dataplane::Protocol::kTcp};
    core::Label label;
    for (std::size_t t = 0; t < multi.registry.size(); ++t) {
      if (rng() % 4 == 0) label.insert(core::TagId(static_cast<unsigned>(t)));
    }
    dataplane::DifcHeader h{label, {}};
    const auto& local = switches.at(dst.switch_id).tables();
    auto a = dataplane::match_policies(dataplane::apply_privileges(h, key, local).tags, {}, key,
                                       local);
    auto b = dataplane::match_policies(
        dataplane::apply_privileges(h, key, collapsed.tables()).tags, {}, key, collapsed.tables());
    if (!(a.decision == b.decision)) ++mismatches;
  }
  if (mismatches) o.Fail(std::to_string(mismatches) + " verdict mismatches");
  std::string loads;
  for (const auto& row : report.rows) loads += " " + row.switch_id + "=" + std::to_string(row.total());
  char buf[64];
  std::snprintf(buf, sizeof buf, "average reduction %.1f%%;", 100 * report.average_reduction);
  o.Note(buf + loads + "; 1000 flows agree");
  return o;
}

Outcome TernaryAccounting() {
  Outcome o;
  sim::Topology topo = sim::Topology::Load(ScenarioPath("enterprise.topo"));
  std::mt19937_64 rng(0x5eed0007);
  std::string text = LabelDirectives();
  for (int f = 0; f < 10; ++f) {
    text += "label_file(ip=Server1, file=/data/f" + std::to_string(f) + ")\n";
  }
  int contains = 0, tracker = 0, exact = 0;
  for (int i = 0; i < 1200; ++i) {
    const std::string& a = kEnterpriseHosts[rng() % kEnterpriseHosts.size()];
    const std::string& b = kEnterpriseHosts[rng() % kEnterpriseHosts.size()];
    std::string action = rng() % 2 ? "allow" : "drop";
    if (i % 12 == 0) {
      text += "if match(pkt_label contains " + a + " && dst_ip==" + b + ") then " + action + "\n";
      ++contains;
    } else if (i % 12 == 1) {
      text += "if match(tracker_id==/data/f" + std::to_string(rng() % 10) +
              "@Server1 && dst_ip==" + b + ") then drop\n";
      ++tracker;
    } else {
      text += "if match(src_ip==" + a + " && dst_ip==" + b + ") then " + action + "\n";
      ++exact;
    }
  }
  netcl::Program program = netcl::Parse(text);
  netcl::CompileOptions multi_opts, single_opts;
  multi_opts.collapse_to = single_opts.collapse_to = "S1";
  single_opts.single_table = true;
  auto multi = netcl::Compile(program, topo.ToBindings(), {}, multi_opts);
  auto single = netcl::Compile(program, topo.ToBindings(), {}, single_opts);
  dataplane::Switch a("S1"), b("S1");
  a.LoadConfig(multi.configs.at("S1"));
  b.LoadConfig(single.configs.at("S1"));
  const std::size_t multi_t = a.ternary_occupancy(), single_t = b.ternary_occupancy();
  if (program.policies.size() != 1200 || contains != 100) o.Fail("bad rule mix");
  if (multi_t != multi.total_entries(dataplane::TableKind::kTernary)) o.Fail("occupancy mismatch");
  if (multi_t == 0 || single_t != 12 * multi_t) {
    o.Fail("ternary " + std::to_string(single_t) + "/" + std::to_string(multi_t));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "ternary %zu / %zu = %.1f", single_t, multi_t,
                multi_t ? static_cast<double>(single_t) / static_cast<double>(multi_t) : 0.0);
  o.Note(buf);
  return o;
}

// ---------------------------------------------------------------------------

// Independent model of label flow on one host: entity versions connected by
// timestamped edges. An entity's label at time t is its initial label joined
// with the labels of every source whose edge into it happened before t,
// evaluated at the edge's time. The tracker is that of the latest such edge
// whose source carried one.
class ProvenanceOracle {
 public:
  using Node = int;
  struct Value {
    core::Label label;
    core::TrackerId tracker;
  };

  Node NewNode(Value init) {
    init_.push_back(init);
    in_.emplace_back();
    return static_cast<Node>(init_.size()) - 1;
  }
  void AddEdge(Node from, Node to, std::int64_t t) { in_[to].push_back({from, t}); }

  Value At(Node n, std::int64_t t) {
    auto key = std::make_pair(n, t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Value v = init_[n];
    std::int64_t tracker_time = -1;
    for (const auto& [src, et] : in_[n]) {
      if (et >= t) continue;
      Value s = At(src, et);
      v.label |= s.label;
      if (s.tracker.present() && et > tracker_time) {
        v.tracker = s.tracker;
        tracker_time = et;
      }
    }
    memo_[key] = v;
    return v;
  }

 private:
  std::vector<Value> init_;
  std::vector<std::vector<std::pair<Node, std::int64_t>>> in_;
  std::map<std::pair<Node, std::int64_t>, Value> memo_;
};

Outcome HostProvenance() {
  Outcome o;
  std::mt19937_64 rng(0x5eed0008);
  constexpr int kTraces = 1000;
  constexpr std::int64_t kEnd = std::numeric_limits<std::int64_t>::max();
  const core::Label host_label{core::TagId(0), core::TagId(1)};
  std::uint64_t events = 0, mismatches = 0, reboot_failures = 0;

  for (int trace = 0; trace < kTraces; ++trace) {
    host::HostAgentOptions hopts;
    hopts.in_label_ttl = Seconds(3600);
    host::HostAgent agent("h", Ipv4(0x0a000001), host_label, hopts);
    agent.Boot({}, 0);  // empty snapshot: start from defaults
    ProvenanceOracle oracle;
    std::map<host::Pid, ProvenanceOracle::Node> pid_node;
    std::map<host::Inode, ProvenanceOracle::Node> file_node;
    std::set<host::Pid> live_pids;  // pids with an explicit agent entry
    std::map<std::string, core::TrackerId> pending;
    std::map<host::Inode, std::string> file_path;

    auto pid = [&](host::Pid p) {
      auto it = pid_node.find(p);
      if (it == pid_node.end()) it = pid_node.emplace(p, oracle.NewNode({host_label, {}})).first;
      return it->second;
    };
    auto ctrl = [&](const std::string& path, std::uint32_t tracker) {
      dataplane::SimPacket pkt;
      pkt.control = dataplane::ControlPayload{dataplane::ControlKind::kLabelFile, {}, path,
                                              core::TrackerId(tracker)};
      agent.on_ingress(pkt, 0);
      pending[path] = core::TrackerId(tracker);
    };
    // Label host init is delivered first, as on a real boot.
    {
      dataplane::SimPacket pkt;
      pkt.control = dataplane::ControlPayload{dataplane::ControlKind::kLabelHost, host_label, {}, {}};
      agent.on_ingress(pkt, 0);
    }
    ctrl("/p1", 1);
    ctrl("/p2", 2);

    const int length = 1 + static_cast<int>(rng() % 200);
    const int reboot_at = length > 2 ? length / 2 : -1;
    for (int i = 0; i < length; ++i) {
      const SimTime now = Millis(i + 1);
      const std::int64_t t = 2 * static_cast<std::int64_t>(i);
      ++events;
      if (i == reboot_at) {
        auto before = agent.state().file_labels;
        auto blob = agent.snapshot();
        agent.on_reboot(now, rng() % 2);
        if (agent.state().file_labels != before || !agent.state().pid_labels.empty()) {
          ++reboot_failures;
        }
        host::HostAgent fresh("h", Ipv4(0x0a000001), {}, hopts);
        fresh.restore(blob);
        if (fresh.state().file_labels != before || !fresh.state().pid_labels.empty()) {
          ++reboot_failures;
        }
        pid_node.clear();
        live_pids.clear();
        continue;
      }
      const host::Pid p = 1 + static_cast<host::Pid>(rng() % 12);
      const host::Inode ino = 1 + rng() % 10;
      switch (rng() % 8) {
        case 0: {  // spawn
          if (live_pids.contains(p)) break;
          host::Pid parent = 1 + static_cast<host::Pid>(rng() % 12);
          if (parent == p) break;
          auto from = pid(parent);
          agent.on_process_create(parent, p, now);
          pid_node[p] = oracle.NewNode({host_label, {}});
          oracle.AddEdge(from, pid_node[p], t);
          live_pids.insert(p);
          break;
        }
        case 1:  // exit
          agent.on_process_exit(p, now);
          pid_node.erase(p);
          live_pids.erase(p);
          break;
        case 2: {  // create
          if (file_node.contains(ino)) break;
          std::string path;
          if (rng() % 3 == 0) path = rng() % 2 ? "/p1" : "/p2";
          for (const auto& [i2, pth] : file_path) {
            if (pth == path) path.clear();
          }
          agent.on_file_create(p, ino, now, path);
          file_node[ino] = oracle.NewNode({});
          oracle.AddEdge(pid(p), file_node[ino], t);
          if (!path.empty()) {
            file_path[ino] = path;
            if (auto it = pending.find(path); it != pending.end()) {
              oracle.AddEdge(oracle.NewNode({{}, it->second}), file_node[ino], t + 1);
              pending.erase(it);
            }
          }
          break;
        }
        case 3:  // read
          if (!file_node.contains(ino)) break;
          agent.on_file_read(p, ino, now);
          oracle.AddEdge(file_node[ino], pid(p), t);
          live_pids.insert(p);
          break;
        case 4:  // write
          if (!file_node.contains(ino)) break;
          agent.on_file_write(p, ino, now);
          oracle.AddEdge(pid(p), file_node[ino], t);
          break;
        case 5:  // delete
          agent.on_file_delete(ino, now);
          file_node.erase(ino);
          file_path.erase(ino);
          break;
        default: {  // labeled packet received and accepted
          core::Label l;
          for (unsigned tag = 2; tag < 10; ++tag) {
            if (rng() % 3 == 0) l.insert(core::TagId(tag));
          }
          core::TrackerId tr(static_cast<std::uint32_t>(rng() % 3 == 0 ? 3 + rng() % 2 : 0));
          dataplane::SimPacket pkt;
          pkt.src_ip = Ipv4(0x0a0000fe);
          pkt.dst_ip = Ipv4(0x0a000001);
          pkt.src_port = 5555;
          pkt.dst_port = static_cast<std::uint16_t>(8000 + rng() % 4);
          pkt.AttachHeader({l, tr});
          agent.on_ingress(pkt, now);
          agent.on_accept(p, pkt.dst_port, now);
          oracle.AddEdge(oracle.NewNode({l, tr}), pid(p), t);
          live_pids.insert(p);
          break;
        }
      }
    }
    for (host::Pid p = 1; p <= 12; ++p) {
      auto want = oracle.At(pid(p), kEnd);
      auto got = agent.PidLabel(p);
      if (got.label != want.label || got.tracker != want.tracker) ++mismatches;
    }
    if (agent.state().file_labels.size() != file_node.size()) ++mismatches;
    for (const auto& [ino, node] : file_node) {
      auto it = agent.state().file_labels.find(ino);
      auto want = oracle.At(node, kEnd);
      if (it == agent.state().file_labels.end() || it->second.label != want.label ||
          it->second.tracker != want.tracker) {
        ++mismatches;
      }
    }
  }
  if (mismatches) o.Fail(std::to_string(mismatches) + " label/tracker mismatches");
  if (reboot_failures) o.Fail(std::to_string(reboot_failures) + " reboot state failures");
  o.Note(std::to_string(kTraces) + " traces, " + std::to_string(events) + " events");
  return o;
}

// ---------------------------------------------------------------------------

Outcome RateLimit() {
  Outcome o;
  const Ipv4 server(0x0a320001);  // 10.50.0.1
  netcl::Bindings b;
  b.hosts.push_back({"Server", server, "S1"});
  auto compiled = netcl::Compile(netcl::Parse("if match(dst_ip==any) then allow\n"), b);

  dataplane::SwitchOptions sopts;
  sopts.rate_limit = {Seconds(1), 1000};
  dataplane::Switch sw("S1", sopts);
  sw.AttachLocal({server, 32});
  sw.AddRoute({server, 32}, 1);
  sw.AddRoute({Ipv4(0), 0}, 2);
  sw.LoadConfig(compiled.configs.at("S1"));
  controlplane::ControlPlane cp(Millis(10));
  auto lookup = [&](const std::string&) { return &sw; };

  struct Attempt {
    SimTime at;
    dataplane::FlowKey key;
    bool benign;
  };
  std::vector<Attempt> attempts;
  constexpr std::uint32_t kAttack = 1'000'000;
  constexpr std::uint32_t kBenign = 1'000;
  const SimTime span = Seconds(100);
  const Ipv4 attacker(0xc6336442);
  for (std::uint32_t i = 0; i < kAttack; ++i) {
    attempts.push_back({span / kAttack * i,
                        {attacker, static_cast<std::uint16_t>(1024 + i % 60000), server,
                         static_cast<std::uint16_t>(1000 + i / 60000), dataplane::Protocol::kTcp},
                        false});
  }
  std::mt19937_64 rng(0x5eed0009);
  std::set<dataplane::FlowKey> benign;
  for (std::uint32_t i = 0; i < kBenign; ++i) {
    dataplane::FlowKey k{Ipv4(0x0a3c0000 + i + 1), 40000, server, 443, dataplane::Protocol::kTcp};
    benign.insert(k);
    attempts.push_back({static_cast<SimTime>(rng() % span), k, true});
  }
  std::stable_sort(attempts.begin(), attempts.end(),
                   [](const Attempt& a, const Attempt& b) { return a.at < b.at; });

  std::uint64_t admitted_benign = 0, throttled_attack = 0;
  for (const auto& a : attempts) {
    cp.ServeDue(a.at, lookup);
    dataplane::SimPacket pkt;
    pkt.src_ip = a.key.src_ip;
    pkt.src_port = a.key.src_port;
    pkt.dst_ip = a.key.dst_ip;
    pkt.dst_port = a.key.dst_port;
    pkt.tcp_flags = dataplane::tcp::kSyn;
    pkt.AttachHeader({});
    auto r = sw.Process(pkt, a.at);
    for (const auto& req : r.requests) cp.Submit(req);
    if (a.benign && r.forwarded()) ++admitted_benign;
    if (!a.benign && r.stage == dataplane::Stage::kThrottled) ++throttled_attack;
  }
  cp.ServeDue(span + Seconds(1), lookup);
  std::uint64_t installed = 0;
  for (const auto& k : benign) {
    auto d = sw.conndec().Peek(k);
    if (d && d->action.forwards()) ++installed;
  }
  if (admitted_benign != kBenign) o.Fail("admitted " + std::to_string(admitted_benign));
  if (installed != kBenign) o.Fail("installed " + std::to_string(installed));
  if (throttled_attack == 0) o.Fail("limiter never engaged");
  o.Note("benign admitted " + std::to_string(admitted_benign) + "/1000, installed " +
         std::to_string(installed) + "/1000; attacker throttled " +
         std::to_string(throttled_attack));
  return o;
}

Outcome Codec() {
  Outcome o;
  std::vector<dataplane::DifcHeader> cases;
  std::bitset<core::kTagSpace> all;
  all.set();
  for (std::uint32_t tr : {0u, 1u, 0xffffffffu}) {
    cases.push_back({core::Label{}, core::TrackerId(tr)});
    cases.push_back({core::Label::FromBits(all), core::TrackerId(tr)});
    cases.push_back({core::Label{core::TagId(0)}, core::TrackerId(tr)});
    cases.push_back({core::Label{core::TagId(core::kTagSpace - 1)}, core::TrackerId(tr)});
  }
  const std::size_t boundary = cases.size();
  std::mt19937_64 rng(0x5eed0010);
  for (int i = 0; i < 100000; ++i) {
    std::bitset<core::kTagSpace> bits;
    const int density = static_cast<int>(rng() % 5);
    for (unsigned t = 0; t < core::kTagSpace; ++t) {
      if (density && rng() % (1u << density) == 0) bits.set(t);
    }
    std::uint32_t tr = rng() % 2 ? static_cast<std::uint32_t>(rng()) : 0;
    cases.push_back({core::Label::FromBits(bits), core::TrackerId(tr)});
  }
  std::uint64_t mismatches = 0;
  for (const auto& h : cases) {
    auto wire = dataplane::EncodeHeader(h);
    std::size_t used = 0;
    auto back = dataplane::DecodeHeader(wire, &used);
    const std::size_t want = h.tracker.present() ? 37 : 33;
    // Independent view of the layout.
    bool layout = wire.size() == want && wire[0] == (h.tracker.present() ? 1 : 0);
    for (unsigned t = 0; layout && t < core::kTagSpace; ++t) {
      layout = ((wire[1 + t / 8] & (0x80 >> (t % 8))) != 0) == h.tags.contains(core::TagId(t));
    }
    if (h.tracker.present() && layout) {
      std::uint32_t v = (std::uint32_t{wire[33]} << 24) | (std::uint32_t{wire[34]} << 16) |
                        (std::uint32_t{wire[35]} << 8) | wire[36];
      layout = v == h.tracker.value();
    }
    if (!(back == h) || used != wire.size() || !layout ||
        dataplane::EncodeHeader(back) != wire) {
      ++mismatches;
    }
  }
  if (mismatches) o.Fail(std::to_string(mismatches) + " mismatches");
  o.Note(std::to_string(boundary) + " boundary + 100000 random headers, 0 mismatches");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "reachability table", Reachability},
      {"AC2", "route enumeration", RouteEnumeration},
      {"AC3", "attack route coverage", Coverage},
      {"AC4", "golden scenarios", GoldenScenarios},
      {"AC5", "per-flow decision consistency", DecisionConsistency},
      {"AC6", "distributed placement", Placement},
      {"AC7", "ternary accounting", TernaryAccounting},
      {"AC8", "host provenance soundness", HostProvenance},
      {"AC9", "rate-limit resilience", RateLimit},
      {"AC10", "header codec", Codec},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %s %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), SecondsSince(start));
    std::fflush(stdout);
  }
  return failed;
}
