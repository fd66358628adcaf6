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

#ifndef DIFCNET_SIM_SCENARIO_H_
#define DIFCNET_SIM_SCENARIO_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "difcnet/netcl/ast.h"
#include "difcnet/sim/network.h"
#include "difcnet/sim/topology.h"

namespace difcnet::sim {

// Scenario files are line oriented, `#` starts a comment. Header lines:
//
//   topology <path>            relative to the scenario file
//   policy <path>
//   rtt <dur>                  control-plane round trip (default 10ms)
//   gap <dur>                  spacing of data packets (default 100us)
//
// Steps run in order; the network runs until idle after each one.
//
//   spawn <host> pid=<p> [parent=<p>]
//   exit <host> pid=<p>
//   create <host> pid=<p> inode=<i> [path=<path>]
//   read|write <host> pid=<p> inode=<i>
//   delete <host> inode=<i>
//   reboot|crash <host>
//   connect <flow> <src> pid=<p> -> <dst>:<port> [proto=tcp|udp|icmp]
//       [packets=<n>] [server_pid=<p>]
//
// Expectations are checked at the point they appear:
//
//   expect flow <flow> allowed|dropped [rule=<n>|rule=default]
//   expect label <host> pid=<p> has|lacks|is {Tag, ...}
//   expect file <host> inode=<i> has|lacks|is {Tag, ...}
//   expect tracker <host> pid=<p> <path>@<host>|none
struct ScenarioStep {
  int line = 0;
  std::string text;  // the statement as written, comments stripped
  std::string verb;  // "expect" steps keep their subject in args[0]
  std::vector<std::string> args;
  std::map<std::string, std::string, std::less<>> kv;
  std::string label_text;  // `{...}` literal, if any
};

struct Scenario {
  std::string name;
  std::string topology_path;
  std::string policy_path;
  Topology topology;
  netcl::Program program;
  NetworkOptions options;
  std::vector<ScenarioStep> steps;

  // Throws ScenarioError, TopologyError or SyntaxError.
  static Scenario Parse(std::string_view text, const std::string& base_dir,
                        std::string name = "scenario");
  static Scenario Load(const std::string& path);
};

struct ExpectationResult {
  int line = 0;
  std::string text;
  bool passed = false;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::vector<ExpectationResult> expectations;
  std::vector<TraceRecord> trace;
  // Client 5-tuple of every `connect` step, by flow name.
  std::map<std::string, dataplane::FlowKey> flows;

  bool passed() const;
  std::string TraceText() const;
  std::string Summary() const;
};

// Compiles the policy against the topology, boots the network and replays the
// steps. Throws ScenarioError on references to unknown flows or hosts.
ScenarioReport run_scenario(const Scenario& s);

}  // namespace difcnet::sim

#endif  // DIFCNET_SIM_SCENARIO_H_
