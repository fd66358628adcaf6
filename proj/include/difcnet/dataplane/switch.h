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

#ifndef DIFCNET_DATAPLANE_SWITCH_H_
#define DIFCNET_DATAPLANE_SWITCH_H_

#include <optional>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/time.h"
#include "difcnet/core/trace.h"
#include "difcnet/dataplane/flow_state.h"
#include "difcnet/dataplane/packet.h"
#include "difcnet/dataplane/switch_config.h"
#include "difcnet/dataplane/tables.h"

namespace difcnet::dataplane {

struct SwitchOptions {
  unsigned buffer_index_bits = 16;
  std::size_t conndec_capacity = ConnDecTable::kDefaultCapacity;
  // Must exceed the control-plane RTT so a recirculated packet finds the
  // installed ConnDec entry.
  SimTime recirculation_delay = Millis(11);
  unsigned max_recirculations = 3;
  RateLimitConfig rate_limit;
};

// Request for the control plane to pin a decision into ConnDec.
struct InstallRequest {
  std::string switch_id;
  FlowKey flow;
  Decision decision;
  SimTime requested_at = 0;
};

enum class Stage {
  kControl,      // switch-generated control traffic, forwarded as is
  kTransit,      // not the enforcement point for this packet
  kConnDec,      // verdict from the ConnDec table
  kBuffer,       // verdict from the decision buffer
  kPolicy,       // labeled packet matched against the policy tables
  kThrottled,    // labeled packet dropped by the rate limiter
  kMalformed,    // DIFC header failed to parse
  kRecirculate,  // verdict not yet available, packet re-enters later
  kRecircExhausted,
  kNoRoute,
};

std::string StageName(Stage s);

struct Emission {
  enum class Kind { kForward, kGeneratedAck, kRecirculate };
  Kind kind = Kind::kForward;
  SimPacket packet;
  std::uint16_t port = 0;
  SimTime delay = 0;
};

struct PipelineResult {
  Stage stage = Stage::kTransit;
  Decision decision;
  std::vector<TableKind> tables_hit;
  std::vector<Emission> emitted;
  std::vector<InstallRequest> requests;
  bool alert = false;
  // Label seen on ingress and written back after the privilege stage.
  std::optional<DifcHeader> header_in;
  std::optional<DifcHeader> header_out;

  bool forwarded() const;
  TraceRecord ToTrace(SimTime now, const std::string& node, const SimPacket& pkt) const;
};

// Software model of one programmable switch. The switch is the enforcement
// point for packets whose destination is attached to it; everything else is
// forwarded without matching. Reverse-direction packets of a connection the
// switch already decided are also handled here and marked as enforced, so
// downstream switches only forward them.
class Switch {
 public:
  explicit Switch(std::string id, SwitchOptions opts = {});

  const std::string& id() const { return id_; }
  const SwitchOptions& options() const { return opts_; }

  void AttachLocal(const Ipv4Prefix& prefix) { local_.push_back(prefix); }
  bool IsLocal(Ipv4 addr) const;
  void AddRoute(const Ipv4Prefix& prefix, std::uint16_t port);
  std::optional<std::uint16_t> Route(Ipv4 dst) const;
  bool HasPort(std::uint16_t port) const;

  // Replaces all tables with the config's entries.
  void LoadConfig(const SwitchConfig& config);
  // Applies every removal and addition or none of them. Throws UnknownEntry.
  void ApplyUpdate(const SwitchUpdate& update);

  PipelineResult Process(SimPacket pkt, SimTime now);

  InstallStatus InstallConnDec(const FlowKey& key, const Decision& d, SimTime now) {
    return conndec_.Install(key, d, now);
  }
  std::size_t CollectIdle(SimTime now, SimTime idle_timeout) {
    return conndec_.CollectIdle(now, idle_timeout);
  }

  const PolicyTables& tables() const { return tables_; }
  const ConnDecTable& conndec() const { return conndec_; }
  const DecisionBuffer& buffer() const { return buffer_; }

  // Ternary occupancy is what the TCAM has to hold.
  std::size_t ternary_occupancy() const { return tables_.size(TableKind::kTernary); }

 private:
  PipelineResult Forward(SimPacket pkt, Stage stage);
  void Execute(PipelineResult& r, SimPacket pkt);
  SimPacket LabelAck(const SimPacket& pkt) const;
  PipelineResult Recirculate(SimPacket pkt);

  std::string id_;
  SwitchOptions opts_;
  std::vector<Ipv4Prefix> local_;
  std::vector<std::pair<Ipv4Prefix, std::uint16_t>> routes_;
  PolicyTables tables_;
  DecisionBuffer buffer_;
  ConnDecTable conndec_;
  RateLimiter limiter_;
};

}  // namespace difcnet::dataplane

#endif  // DIFCNET_DATAPLANE_SWITCH_H_
