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

#ifndef DIFCNET_HOSTAGENT_HOST_AGENT_H_
#define DIFCNET_HOSTAGENT_HOST_AGENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/label.h"
#include "difcnet/core/time.h"
#include "difcnet/core/trace.h"
#include "difcnet/dataplane/packet.h"

namespace difcnet::host {

using Pid = std::uint32_t;
using Inode = std::uint64_t;

struct Tagged {
  core::Label label;
  core::TrackerId tracker;
  friend bool operator==(const Tagged&, const Tagged&) = default;
};

struct HostState {
  struct InLabel {
    Tagged tag;
    SimTime at = 0;
    std::string origin;  // provenance entity of the carrying flow
  };
  std::map<std::uint16_t, InLabel> in_labels;
  std::map<Pid, Tagged> pid_labels;
  std::map<Inode, Tagged> file_labels;
  std::map<std::uint16_t, Tagged> out_labels;
  core::Label host_label;
  core::CapabilitySet caps;
  std::map<dataplane::FlowKey, unsigned> udp_pending;
  std::set<dataplane::FlowKey> udp_acked;
  // Paths named by label_file, and trackers waiting for their file.
  std::map<std::string, Inode> file_paths;
  std::map<std::string, core::TrackerId> pending_trackers;
};

struct HostAgentOptions {
  unsigned udp_label_prefix = 3;
  // Labels recorded for a port nobody accepts on are dropped after this long.
  SimTime in_label_ttl = Seconds(60);
};

struct HostEvent {
  enum class Kind {
    kIngress,
    kAccept,
    kProcessCreate,
    kProcessExit,
    kFileCreate,
    kFileRead,
    kFileWrite,
    kFileDelete,
    kSend,
    kEgress,
    kLabelAck,
    kReboot,
    kCrash,
  };
  SimTime time = 0;
  Kind kind = Kind::kIngress;
  Pid pid = 0;
  Pid child = 0;
  Inode inode = 0;
  std::uint16_t port = 0;
  std::string path;
  dataplane::FlowKey flow;  // kLabelAck
  std::optional<dataplane::SimPacket> packet;
};

std::string HostEventKindName(HostEvent::Kind k);
// Line format: t=<ns> node=<host> event=<kind> followed by the event's fields.
TraceRecord FormatHostEvent(const HostEvent& ev, const std::string& host);
HostEvent ParseHostEvent(const TraceRecord& rec);

// Deterministic model of the per-host agent. Labels propagate freely inside
// the host; enforcement happens only at switches.
class HostAgent {
 public:
  HostAgent(std::string name, Ipv4 ip, core::Label default_label = {},
            HostAgentOptions opts = {});

  const std::string& name() const { return name_; }
  Ipv4 ip() const { return ip_; }
  const HostState& state() const { return state_; }
  const HostAgentOptions& options() const { return opts_; }
  void set_caps(const core::CapabilitySet& caps) { state_.caps = caps; }

  // Label of a pid, falling back to the host label for unknown pids.
  Tagged PidLabel(Pid pid) const;

  // Returns the packet handed to the stack, or nothing for control packets
  // and malformed headers. `origin` names the provenance entity of the
  // carrying flow; it defaults to the flow itself.
  std::optional<dataplane::SimPacket> on_ingress(dataplane::SimPacket pkt, SimTime now,
                                                 std::string origin = {});
  void on_accept(Pid pid, std::uint16_t dport, SimTime now);
  void on_process_create(Pid parent, Pid child, SimTime now);
  void on_process_exit(Pid pid, SimTime now);
  void on_file_create(Pid pid, Inode inode, SimTime now, const std::string& path = {});
  void on_file_read(Pid pid, Inode inode, SimTime now);
  void on_file_write(Pid pid, Inode inode, SimTime now);
  void on_file_delete(Inode inode, SimTime now);
  void on_send(Pid pid, std::uint16_t sport, SimTime now);
  dataplane::SimPacket on_egress(dataplane::SimPacket pkt, SimTime now);
  // `flow` is the flow as this host sent it.
  void on_label_ack(const dataplane::FlowKey& flow, SimTime now);

  // Reboot and crash both persist maps and restart from the backup.
  void on_reboot(SimTime now, bool crash = false);

  // Returns the ingress/egress result for packet events.
  std::optional<dataplane::SimPacket> Apply(const HostEvent& ev);

  std::vector<std::uint8_t> snapshot() const;
  // Throws CorruptSnapshot and leaves the state untouched.
  void restore(std::span<const std::uint8_t> blob);
  // Restore, falling back to defaults with an alert when the blob is bad.
  void Boot(std::span<const std::uint8_t> blob, SimTime now);

  // Event log including provenance edges (fields `from` and `to`).
  const std::vector<TraceRecord>& log() const { return log_; }
  void clear_log() { log_.clear(); }

  // Provenance entity names.
  std::string PidEntity(Pid pid) const;
  std::string FileEntity(Inode inode) const;

 private:
  TraceRecord& Log(SimTime now, std::string event);
  void Edge(SimTime now, const std::string& event, const std::string& from,
            const std::string& to, const Tagged& tag);
  void Adopt(Tagged& dst, const Tagged& src, const std::string& who, SimTime now);
  void ApplyControl(const dataplane::ControlPayload& c, SimTime now);
  void ExpireInLabels(SimTime now);

  std::string name_;
  Ipv4 ip_;
  core::Label default_label_;
  HostAgentOptions opts_;
  HostState state_;
  // Incarnation counters so a reused pid or inode is a new entity.
  std::map<Pid, unsigned> pid_gen_;
  std::map<Inode, unsigned> file_gen_;
  std::map<std::uint16_t, std::string> out_origin_;
  std::vector<TraceRecord> log_;
};

}  // namespace difcnet::host

#endif  // DIFCNET_HOSTAGENT_HOST_AGENT_H_
