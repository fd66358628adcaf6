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

#include "difcnet/sim/scenario.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "difcnet/core/errors.h"
#include "difcnet/core/tag_registry.h"
#include "difcnet/netcl/compiler.h"
#include "difcnet/netcl/parser.h"

namespace difcnet::sim {

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string Where(int line) { return "line " + std::to_string(line) + ": "; }

std::uint64_t ToNumber(const ScenarioStep& st, std::string_view key) {
  auto it = st.kv.find(key);
  if (it == st.kv.end()) {
    throw ScenarioError(Where(st.line) + "missing " + std::string(key) + "=");
  }
  std::uint64_t v = 0;
  const std::string& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ScenarioError(Where(st.line) + "bad number '" + s + "'");
  }
  return v;
}

ScenarioStep Tokenize(std::string_view line, int lineno) {
  ScenarioStep st;
  st.line = lineno;
  auto first = line.find_first_not_of(" \t");
  auto last = line.find_last_not_of(" \t\r");
  st.text = std::string(line.substr(first, last - first + 1));
  if (auto open = line.find('{'); open != std::string_view::npos) {
    auto close = line.find('}', open);
    if (close == std::string_view::npos) throw ScenarioError(Where(lineno) + "unclosed '{'");
    st.label_text = std::string(line.substr(open, close - open + 1));
    line = line.substr(0, open);
  }
  std::istringstream in{std::string(line)};
  std::string tok;
  in >> st.verb;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq != std::string::npos && eq > 0) {
      st.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    } else {
      st.args.push_back(tok);
    }
  }
  return st;
}

const std::set<std::string, std::less<>> kVerbs = {
    "spawn", "exit", "create", "read", "write", "delete",
    "reboot", "crash", "connect", "expect"};

dataplane::Protocol ParseProto(const ScenarioStep& st) {
  auto it = st.kv.find("proto");
  if (it == st.kv.end() || it->second == "tcp") return dataplane::Protocol::kTcp;
  if (it->second == "udp") return dataplane::Protocol::kUdp;
  if (it->second == "icmp") return dataplane::Protocol::kIcmp;
  throw ScenarioError(Where(st.line) + "unknown proto '" + it->second + "'");
}

class Runner {
 public:
  explicit Runner(const Scenario& s)
      : s_(s),
        compiled_(netcl::Compile(s.program, s.topology.ToBindings())),
        net_(s.topology, &compiled_, s.options) {}

  ScenarioReport Run() {
    ScenarioReport report;
    report.name = s_.name;
    net_.Start();
    for (const auto& st : s_.steps) {
      if (st.verb == "expect") {
        report.expectations.push_back(Check(st));
      } else {
        Step(st);
        net_.Run();
      }
    }
    report.trace = net_.trace();
    report.flows = flows_;
    return report;
  }

 private:
  host::HostAgent& Agent(const ScenarioStep& st, std::size_t arg = 0) {
    if (st.args.size() <= arg) throw ScenarioError(Where(st.line) + "missing host");
    if (!s_.topology.Find(st.args[arg])) {
      throw ScenarioError(Where(st.line) + "unknown host '" + st.args[arg] + "'");
    }
    return net_.agent(st.args[arg]);
  }

  void Step(const ScenarioStep& st) {
    const SimTime now = net_.now();
    if (st.verb == "spawn") {
      auto parent = st.kv.contains("parent") ? ToNumber(st, "parent") : 0;
      Agent(st).on_process_create(static_cast<host::Pid>(parent),
                                  static_cast<host::Pid>(ToNumber(st, "pid")), now);
    } else if (st.verb == "exit") {
      Agent(st).on_process_exit(static_cast<host::Pid>(ToNumber(st, "pid")), now);
    } else if (st.verb == "create") {
      auto path = st.kv.contains("path") ? st.kv.at("path") : std::string();
      Agent(st).on_file_create(static_cast<host::Pid>(ToNumber(st, "pid")),
                               ToNumber(st, "inode"), now, path);
    } else if (st.verb == "read") {
      Agent(st).on_file_read(static_cast<host::Pid>(ToNumber(st, "pid")),
                             ToNumber(st, "inode"), now);
    } else if (st.verb == "write") {
      Agent(st).on_file_write(static_cast<host::Pid>(ToNumber(st, "pid")),
                              ToNumber(st, "inode"), now);
    } else if (st.verb == "delete") {
      Agent(st).on_file_delete(ToNumber(st, "inode"), now);
    } else if (st.verb == "reboot" || st.verb == "crash") {
      Agent(st).on_reboot(now, st.verb == "crash");
    } else if (st.verb == "connect") {
      Connect(st);
    }
  }

  void Connect(const ScenarioStep& st) {
    // connect <flow> <src> -> <dst>:<port>
    if (st.args.size() != 4 || st.args[2] != "->") {
      throw ScenarioError(Where(st.line) + "expected: connect <flow> <src> pid=<p> -> <dst>:<port>");
    }
    const std::string& name = st.args[0];
    if (flows_.contains(name)) throw ScenarioError(Where(st.line) + "flow '" + name + "' redefined");
    ConnectSpec spec;
    spec.src = st.args[1];
    spec.pid = static_cast<host::Pid>(ToNumber(st, "pid"));
    const std::string& target = st.args[3];
    auto colon = target.rfind(':');
    spec.dst = target.substr(0, colon);
    spec.protocol = ParseProto(st);
    if (colon != std::string::npos) {
      ScenarioStep tmp;
      tmp.line = st.line;
      tmp.kv["port"] = target.substr(colon + 1);
      spec.dport = static_cast<std::uint16_t>(ToNumber(tmp, "port"));
    } else if (spec.protocol != dataplane::Protocol::kIcmp) {
      throw ScenarioError(Where(st.line) + "missing destination port");
    }
    for (const auto* who : {&spec.src, &spec.dst}) {
      if (!s_.topology.Find(*who)) {
        throw ScenarioError(Where(st.line) + "unknown endpoint '" + *who + "'");
      }
    }
    if (st.kv.contains("packets")) spec.packets = static_cast<unsigned>(ToNumber(st, "packets"));
    if (st.kv.contains("server_pid")) {
      spec.server_pid = static_cast<host::Pid>(ToNumber(st, "server_pid"));
    }
    flows_[name] = net_.Connect(spec);
  }

  core::Label ExpectedLabel(const ScenarioStep& st) {
    if (st.label_text.empty()) throw ScenarioError(Where(st.line) + "missing label literal");
    try {
      return core::ParseLabel(st.label_text, compiled_.registry);
    } catch (const Error& e) {
      throw ScenarioError(Where(st.line) + e.what());
    }
  }

  ExpectationResult Compare(ExpectationResult r, const std::string& mode, const core::Label& got,
                            const core::Label& want) {
    if (mode == "has") {
      r.passed = want.is_subset_of(got);
    } else if (mode == "lacks") {
      r.passed = (want & got).empty();
    } else if (mode == "is") {
      r.passed = want == got;
    } else {
      throw ScenarioError(Where(r.line) + "expected has|lacks|is, got '" + mode + "'");
    }
    r.detail = "label " + core::FormatLabel(got, compiled_.registry);
    return r;
  }

  ExpectationResult Check(const ScenarioStep& st) {
    ExpectationResult r;
    r.line = st.line;
    r.text = st.text;
    if (st.args.empty()) throw ScenarioError(Where(st.line) + "empty expectation");
    const std::string& what = st.args[0];
    if (what == "flow") {
      if (st.args.size() != 3) throw ScenarioError(Where(st.line) + "expect flow <flow> allowed|dropped");
      auto it = flows_.find(st.args[1]);
      if (it == flows_.end()) throw ScenarioError(Where(st.line) + "unknown flow '" + st.args[1] + "'");
      const FlowRecord* rec = net_.flow(it->second);
      const std::string& want = st.args[2];
      if (want != "allowed" && want != "dropped") {
        throw ScenarioError(Where(st.line) + "expected allowed|dropped");
      }
      const bool allowed = rec->opened;
      r.passed = (want == "allowed") == allowed;
      r.detail = allowed ? "allowed" : "dropped";
      if (rec->verdict) {
        r.detail += " by " + dataplane::DescribeDecision(*rec->verdict);
        r.detail += rec->enforced_at.empty() ? "" : " at " + rec->enforced_at;
      } else {
        r.detail += " without a verdict";
      }
      if (auto rule = st.kv.find("rule"); rule != st.kv.end()) {
        if (!rec->verdict) {
          r.passed = false;
        } else if (rule->second == "default") {
          r.passed = r.passed && rec->verdict->is_default();
        } else {
          r.passed = r.passed && !rec->verdict->is_default() &&
                     rec->verdict->source_priority == ToNumber(st, "rule");
        }
      }
      return r;
    }
    if (what == "label") {
      if (st.args.size() != 3) throw ScenarioError(Where(st.line) + "expect label <host> pid=<p> has {..}");
      auto& a = Agent(st, 1);
      return Compare(r, st.args[2], a.PidLabel(static_cast<host::Pid>(ToNumber(st, "pid"))).label,
                     ExpectedLabel(st));
    }
    if (what == "file") {
      if (st.args.size() != 3) throw ScenarioError(Where(st.line) + "expect file <host> inode=<i> has {..}");
      auto& a = Agent(st, 1);
      auto inode = ToNumber(st, "inode");
      auto it = a.state().file_labels.find(inode);
      if (it == a.state().file_labels.end()) {
        r.detail = "no such file";
        return r;
      }
      return Compare(r, st.args[2], it->second.label, ExpectedLabel(st));
    }
    if (what == "tracker") {
      if (st.args.size() != 3) throw ScenarioError(Where(st.line) + "expect tracker <host> pid=<p> <path>@<host>");
      auto& a = Agent(st, 1);
      core::TrackerId got = a.PidLabel(static_cast<host::Pid>(ToNumber(st, "pid"))).tracker;
      core::TrackerId want;
      if (st.args[2] != "none") {
        auto at = st.args[2].rfind('@');
        if (at == std::string::npos) throw ScenarioError(Where(st.line) + "expected <path>@<host>");
        const auto* owner = s_.topology.Find(st.args[2].substr(at + 1));
        if (!owner) throw ScenarioError(Where(st.line) + "unknown host in '" + st.args[2] + "'");
        auto t = compiled_.trackers.find({owner->ip, st.args[2].substr(0, at)});
        if (t == compiled_.trackers.end()) {
          throw ScenarioError(Where(st.line) + "no tracker for '" + st.args[2] + "'");
        }
        want = t->second;
      }
      r.passed = got == want;
      r.detail = "tracker " + std::to_string(got.value());
      return r;
    }
    throw ScenarioError(Where(st.line) + "unknown expectation '" + what + "'");
  }

  const Scenario& s_;
  netcl::CompileResult compiled_;
  Network net_;
  std::map<std::string, dataplane::FlowKey> flows_;
};

}  // namespace

Scenario Scenario::Parse(std::string_view text, const std::string& base_dir, std::string name) {
  Scenario s;
  s.name = std::move(name);
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  auto resolve = [&](const std::string& p) {
    return std::filesystem::path(p).is_absolute() ? p : (std::filesystem::path(base_dir) / p).string();
  };
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    ScenarioStep st = Tokenize(raw, lineno);
    if (st.verb == "topology" || st.verb == "policy") {
      if (st.args.size() != 1) throw ScenarioError(Where(lineno) + st.verb + " takes one path");
      (st.verb == "topology" ? s.topology_path : s.policy_path) = resolve(st.args[0]);
    } else if (st.verb == "rtt" || st.verb == "gap") {
      if (st.args.size() != 1) throw ScenarioError(Where(lineno) + st.verb + " takes a duration");
      SimTime d;
      try {
        d = ParseDuration(st.args[0]);
      } catch (const Error& e) {
        throw ScenarioError(Where(lineno) + e.what());
      }
      (st.verb == "rtt" ? s.options.control_rtt : s.options.packet_gap) = d;
    } else if (kVerbs.contains(st.verb)) {
      s.steps.push_back(std::move(st));
    } else {
      throw ScenarioError(Where(lineno) + "unknown statement '" + st.verb + "'");
    }
  }
  if (s.topology_path.empty()) throw ScenarioError("scenario has no topology");
  if (s.policy_path.empty()) throw ScenarioError("scenario has no policy");
  s.topology = Topology::Load(s.topology_path);
  s.program = netcl::Parse(ReadFile(s.policy_path));
  return s;
}

Scenario Scenario::Load(const std::string& path) {
  std::filesystem::path p(path);
  return Parse(ReadFile(path), p.parent_path().string(), p.stem().string());
}

bool ScenarioReport::passed() const {
  for (const auto& e : expectations) {
    if (!e.passed) return false;
  }
  return true;
}

std::string ScenarioReport::TraceText() const {
  std::string out;
  for (const auto& r : trace) out += r.ToString() + "\n";
  return out;
}

std::string ScenarioReport::Summary() const {
  std::string out;
  for (const auto& e : expectations) {
    out += (e.passed ? "PASS " : "FAIL ") + name + ":" + std::to_string(e.line) + " " + e.text +
           " (" + e.detail + ")\n";
  }
  return out;
}

ScenarioReport run_scenario(const Scenario& s) { return Runner(s).Run(); }

}  // namespace difcnet::sim
