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

#ifndef DIFCNET_SIM_NETWORK_H_
#define DIFCNET_SIM_NETWORK_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "difcnet/controlplane/control_plane.h"
#include "difcnet/core/trace.h"
#include "difcnet/dataplane/switch.h"
#include "difcnet/hostagent/host_agent.h"
#include "difcnet/netcl/compiler.h"
#include "difcnet/sim/topology.h"

namespace difcnet::sim {

struct NetworkOptions {
  SimTime control_rtt = Millis(10);
  // Recirculation delay defaults to control_rtt + 1 ms when unset.
  std::optional<SimTime> recirculation_delay;
  unsigned buffer_index_bits = 16;
  std::size_t conndec_capacity = dataplane::ConnDecTable::kDefaultCapacity;
  dataplane::RateLimitConfig rate_limit;
  host::HostAgentOptions host_options;
  // Spacing of a client's packets after the handshake.
  SimTime packet_gap = Micros(100);
  // Plain forwarding: no labels, no policy tables.
  bool enforce = true;
};

struct ConnectSpec {
  std::string src;
  host::Pid pid = 0;
  std::string dst;
  std::uint16_t dport = 0;
  dataplane::Protocol protocol = dataplane::Protocol::kTcp;
  // Data packets after the handshake (TCP) or datagrams in total (UDP).
  unsigned packets = 3;
  host::Pid server_pid = 0;
  std::optional<std::uint16_t> sport;
};

// Per-connection outcome, keyed by the client's 5-tuple.
struct FlowRecord {
  dataplane::FlowKey key;
  bool opened = false;  // SYN, first datagram or echo request delivered
  bool replied = false;  // SYN-ACK or echo reply delivered to the client
  unsigned data_sent = 0;
  unsigned data_delivered = 0;
  std::optional<dataplane::Decision> verdict;  // first labeled packet's decision
  std::string enforced_at;
  // Per enforced packet: forwarded or not, in processing order.
  std::vector<bool> packet_verdicts;
};

// Discrete-event simulation of a topology: one Switch per switch, one
// HostAgent per host and attacker, gateways as unlabeled external endpoints.
// Events are ordered by (time, insertion sequence).
class Network {
 public:
  Network(const Topology& topology, const netcl::CompileResult* compiled,
          NetworkOptions options = {});

  // Sends label-init control packets and runs until they are delivered.
  void Start();

  // Opens a connection at the current time plus `delay`. Returns the key
  // under which the outcome is recorded.
  dataplane::FlowKey Connect(const ConnectSpec& spec, SimTime delay = 0);
  // Runs `fn` at now + delay inside the event loop.
  void Schedule(SimTime delay, std::function<void()> fn);

  void Run();
  void RunUntil(SimTime t);
  SimTime now() const { return now_; }

  host::HostAgent& agent(const std::string& name);
  dataplane::Switch& switch_at(const std::string& id);
  controlplane::ControlPlane& control() { return control_; }
  const Topology& topology() const { return topology_; }

  // Applies a plan between packets.
  void ApplyPlan(const dataplane::UpdatePlan& plan);

  const FlowRecord* flow(const dataplane::FlowKey& key) const;
  const std::map<dataplane::FlowKey, FlowRecord>& flows() const { return flows_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::string TraceText() const;
  // (flow, seq) of every data packet handed to an endpoint's stack, in order.
  const std::vector<std::pair<dataplane::FlowKey, std::uint32_t>>& deliveries() const {
    return deliveries_;
  }

 private:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    }
  };
  struct Conn {
    ConnectSpec spec;
    dataplane::FlowKey key;
  };

  void At(SimTime t, std::function<void()> fn);
  void DrainAgentLogs();
  void SendFromEndpoint(const std::string& name, dataplane::SimPacket pkt);
  void Transmit(const std::string& sw, std::uint16_t port, dataplane::SimPacket pkt);
  void ArriveSwitch(const std::string& sw, dataplane::SimPacket pkt);
  void ArriveEndpoint(const std::string& name, dataplane::SimPacket pkt);
  void StackReceive(const std::string& name, const dataplane::SimPacket& pkt);
  void SendData(const Conn& c);
  dataplane::SimPacket MakePacket(const dataplane::FlowKey& key);
  bool IsExternal(const std::string& name) const;

  const Topology& topology_;
  const netcl::CompileResult* compiled_;
  NetworkOptions options_;
  controlplane::ControlPlane control_;
  std::map<std::string, std::unique_ptr<dataplane::Switch>> switches_;
  std::map<std::string, std::unique_ptr<host::HostAgent>> agents_;
  std::map<std::string, std::uint16_t> next_port_;
  std::map<dataplane::FlowKey, Conn> conns_;  // keyed by client 5-tuple
  std::map<dataplane::FlowKey, FlowRecord> flows_;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::vector<TraceRecord> trace_;
  std::vector<std::pair<dataplane::FlowKey, std::uint32_t>> deliveries_;
  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t next_packet_id_ = 1;
};

}  // namespace difcnet::sim

#endif  // DIFCNET_SIM_NETWORK_H_
