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

// difcnet: command-line front end for policy checks, compilation, scenario
// replay and attack-route analysis.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "difcnet/controlplane/control_plane.h"
#include "difcnet/core/errors.h"
#include "difcnet/netcl/compiler.h"
#include "difcnet/netcl/parser.h"
#include "difcnet/sim/analysis.h"
#include "difcnet/sim/scenario.h"
#include "difcnet/sim/topology.h"

namespace {

using namespace difcnet;

std::string Slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("IOError", "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

netcl::CompileResult CompileFile(const std::string& policy, const std::string& topology,
                                 const netcl::CompileOptions& opts = {}) {
  sim::Topology topo = sim::Topology::Load(topology);
  return netcl::Compile(netcl::Parse(Slurp(policy)), topo.ToBindings(), {}, opts);
}

int Check(const std::string& policy, const std::string& topology) {
  netcl::Program p = netcl::Parse(Slurp(policy));
  std::printf("%s: %zu labeling directives, %zu rules\n", policy.c_str(), p.labelings.size(),
              p.policies.size());
  if (!topology.empty()) {
    auto r = netcl::Compile(p, sim::Topology::Load(topology).ToBindings());
    std::printf("compiled to %zu switch configs\n", r.configs.size());
  }
  return 0;
}

int Run(const std::vector<std::string>& files, const std::string& trace_path) {
  bool ok = true;
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw Error("IOError", "cannot write " + trace_path);
  }
  for (const auto& f : files) {
    sim::ScenarioReport r = sim::run_scenario(sim::Scenario::Load(f));
    std::fputs(r.Summary().c_str(), stdout);
    if (trace) trace << r.TraceText();
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DIFC policy compiler and network simulator"};
  app.require_subcommand(1);

  std::string policy, topology, base, trace_path, target, defense = "p4c", collapse;
  std::vector<std::string> scenarios;
  unsigned steps = 1;
  int allowed = -1;
  bool single_table = false, placement = false;

  auto* check = app.add_subcommand("check", "Parse a policy and report diagnostics");
  check->add_option("policy", policy)->required()->check(CLI::ExistingFile);
  check->add_option("--topology", topology, "Also compile against this topology");

  auto* compile = app.add_subcommand("compile", "Print the per-switch table entries");
  compile->add_option("policy", policy)->required()->check(CLI::ExistingFile);
  compile->add_option("--topology", topology)->required()->check(CLI::ExistingFile);
  compile->add_flag("--single-table", single_table, "Put every match in the ternary table");
  compile->add_option("--collapse", collapse, "Place every rule on this switch");

  auto* apply = app.add_subcommand("apply", "Print the update plan from --base to a policy");
  apply->add_option("policy", policy)->required()->check(CLI::ExistingFile);
  apply->add_option("--base", base)->required()->check(CLI::ExistingFile);
  apply->add_option("--topology", topology)->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Summarize rule placement");
  report->add_option("policy", policy)->required()->check(CLI::ExistingFile);
  report->add_option("--topology", topology)->required()->check(CLI::ExistingFile);
  report->add_flag("--placement", placement, "Per-switch storage versus full replication");

  auto* run = app.add_subcommand("run", "Replay scenarios and check their expectations");
  run->add_option("scenario", scenarios)->required()->check(CLI::ExistingFile);
  run->add_option("--trace", trace_path, "Write the event log here");

  auto* routes = app.add_subcommand("routes", "Attack-route coverage and reachability");
  routes->add_option("topology", topology)->required()->check(CLI::ExistingFile);
  routes->add_option("--target", target)->required();
  routes->add_option("--steps", steps)->required()->check(CLI::Range(1u, 64u));
  routes->add_option("--defense", defense)->check(CLI::IsMember({"fw", "p4c"}));
  routes->add_option("--policy", policy, "NetCL policy for the p4c defense")
      ->check(CLI::ExistingFile);
  routes->add_option("--allowed", allowed,
                     "Firewall: only the first N candidate hosts may reach the target");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return Check(policy, topology);
    if (*compile) {
      netcl::CompileOptions opts;
      opts.single_table = single_table;
      if (!collapse.empty()) opts.collapse_to = collapse;
      std::fputs(dataplane::DumpDeployment(CompileFile(policy, topology, opts).configs).c_str(),
                 stdout);
      return 0;
    }
    if (*apply) {
      auto prev = CompileFile(base, topology);
      auto next = netcl::Compile(netcl::Parse(Slurp(policy)),
                                 sim::Topology::Load(topology).ToBindings(), prev.registry);
      std::fputs(netcl::diff_configs(prev.configs, next.configs).ToString().c_str(), stdout);
      return 0;
    }
    if (*report) {
      auto r = CompileFile(policy, topology);
      sim::Topology topo = sim::Topology::Load(topology);
      if (placement) {
        auto rep = controlplane::placement_report(
            r.configs, netcl::Parse(Slurp(policy)).policies.size(), topo.HostAttachedSwitches());
        std::fputs(rep.ToTable().c_str(), stdout);
      } else {
        for (auto kind : {dataplane::TableKind::kTernary, dataplane::TableKind::kExact,
                          dataplane::TableKind::kTracker, dataplane::TableKind::kPrivilege}) {
          std::printf("%-10s %zu\n", dataplane::TableKindName(kind).c_str(),
                      r.total_entries(kind));
        }
      }
      return 0;
    }
    if (*run) return Run(scenarios, trace_path);
    if (*routes) {
      sim::Topology topo = sim::Topology::Load(topology);
      if (allowed >= 0) topo = sim::WithAllowList(topo, target, static_cast<unsigned>(allowed));
      sim::RouteAnalysis a;
      if (defense == "fw") {
        a = sim::analyze_reachability(topo, sim::FirewallDefense(topo), target, steps);
      } else {
        if (policy.empty()) throw Error("ConfigError", "--defense p4c needs --policy");
        auto compiled = netcl::Compile(netcl::Parse(Slurp(policy)), topo.ToBindings());
        a = sim::analyze_reachability(topo, sim::P4ControlDefense(topo, compiled), target, steps);
      }
      std::printf("target=%s steps=%u defense=%s routes=%llu blocked=%llu coverage=%.1f%% "
                  "reachable=%llu\n",
                  a.target.c_str(), a.step_count, a.defense.c_str(),
                  static_cast<unsigned long long>(a.total_routes),
                  static_cast<unsigned long long>(a.blocked_routes), 100.0 * a.coverage(),
                  static_cast<unsigned long long>(a.reachable_hosts));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "difcnet: %s\n", e.what());
    return 2;
  }
  return 0;
}
