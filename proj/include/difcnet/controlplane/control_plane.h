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

#ifndef DIFCNET_CONTROLPLANE_CONTROL_PLANE_H_
#define DIFCNET_CONTROLPLANE_CONTROL_PLANE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/time.h"
#include "difcnet/core/trace.h"
#include "difcnet/dataplane/switch.h"
#include "difcnet/dataplane/switch_config.h"

namespace difcnet::controlplane {

using SwitchLookup = std::function<dataplane::Switch*(const std::string&)>;

struct InstallOutcome {
  dataplane::InstallRequest request;
  SimTime completed_at = 0;
  dataplane::InstallStatus status = dataplane::InstallStatus::kInstalled;
};

// Serves one install request against `sw`. The caller is responsible for
// calling this no earlier than requested_at + rtt.
dataplane::InstallStatus serve_conndec(const dataplane::InstallRequest& req, SimTime now,
                                       dataplane::Switch& sw);

// Event-driven controller for a deployment. Install requests complete one
// RTT after they were issued; requests with equal completion times are
// served in submission order.
class ControlPlane {
 public:
  explicit ControlPlane(SimTime rtt = Millis(10)) : rtt_(rtt) {}

  SimTime rtt() const { return rtt_; }

  // Returns the completion time.
  SimTime Submit(const dataplane::InstallRequest& req);
  std::optional<SimTime> NextDue() const;
  std::size_t pending() const { return queue_.size(); }
  std::vector<InstallOutcome> ServeDue(SimTime now, const SwitchLookup& lookup);

  // Validates every removal on every switch before touching any table, then
  // applies each switch's update. Throws UnknownEntry or UnknownHost.
  void apply_update(const dataplane::UpdatePlan& plan, const SwitchLookup& lookup);

  std::uint64_t installed() const { return installed_; }
  std::uint64_t duplicates() const { return duplicates_; }
  std::uint64_t rejected() const { return rejected_; }
  const std::vector<TraceRecord>& alerts() const { return alerts_; }

 private:
  struct Pending {
    SimTime due;
    std::uint64_t seq;
    dataplane::InstallRequest req;
    bool operator>(const Pending& o) const {
      return std::tie(due, seq) > std::tie(o.due, o.seq);
    }
  };

  SimTime rtt_;
  std::uint64_t seq_ = 0;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
  std::uint64_t installed_ = 0;
  std::uint64_t duplicates_ = 0;
  std::uint64_t rejected_ = 0;
  std::vector<TraceRecord> alerts_;
};

struct LabelInit {
  std::string switch_id;
  dataplane::SimPacket packet;
};

// One control packet per init directive in the deployment, addressed to the
// host. Throws UnknownHost for hosts outside `hosts`.
std::vector<LabelInit> emit_label_init(const dataplane::DeploymentConfig& configs,
                                       const std::set<Ipv4>& hosts);

struct PlacementReport {
  struct Row {
    std::string switch_id;
    std::size_t ternary = 0;
    std::size_t exact = 0;
    std::size_t tracker = 0;
    std::size_t privilege = 0;
    std::size_t total() const { return ternary + exact + tracker + privilege; }
    // 1 - placed / total_rules.
    double reduction = 0;
  };
  std::vector<Row> rows;
  std::size_t total_rules = 0;
  double average_reduction = 0;

  std::string ToTable() const;
};

// Compares each switch's entry count with a deployment that replicates all
// `total_rules` rules on every switch. Only `switches` are reported when the
// list is non-empty.
PlacementReport placement_report(const dataplane::DeploymentConfig& configs,
                                 std::size_t total_rules,
                                 const std::vector<std::string>& switches = {});

}  // namespace difcnet::controlplane

#endif  // DIFCNET_CONTROLPLANE_CONTROL_PLANE_H_
