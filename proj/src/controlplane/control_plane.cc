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

#include "difcnet/controlplane/control_plane.h"

#include <cstdio>

#include "difcnet/core/errors.h"

namespace difcnet::controlplane {

using dataplane::InstallStatus;

InstallStatus serve_conndec(const dataplane::InstallRequest& req, SimTime now,
                            dataplane::Switch& sw) {
  return sw.InstallConnDec(req.flow, req.decision, now);
}

SimTime ControlPlane::Submit(const dataplane::InstallRequest& req) {
  SimTime due = req.requested_at + rtt_;
  queue_.push({due, seq_++, req});
  return due;
}

std::optional<SimTime> ControlPlane::NextDue() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().due;
}

std::vector<InstallOutcome> ControlPlane::ServeDue(SimTime now, const SwitchLookup& lookup) {
  std::vector<InstallOutcome> out;
  while (!queue_.empty() && queue_.top().due <= now) {
    Pending p = queue_.top();
    queue_.pop();
    dataplane::Switch* sw = lookup(p.req.switch_id);
    if (!sw) throw UnknownHost("no switch " + p.req.switch_id);
    InstallStatus st = serve_conndec(p.req, p.due, *sw);
    switch (st) {
      case InstallStatus::kInstalled:
        ++installed_;
        break;
      case InstallStatus::kDuplicate:
        ++duplicates_;
        break;
      case InstallStatus::kCapacityExceeded: {
        ++rejected_;
        TraceRecord rec{p.due, p.req.switch_id, "alert", {}};
        rec.Add("reason", "conndec-full").Add("flow", p.req.flow.ToString());
        alerts_.push_back(std::move(rec));
        break;
      }
    }
    out.push_back({p.req, p.due, st});
  }
  return out;
}

void ControlPlane::apply_update(const dataplane::UpdatePlan& plan, const SwitchLookup& lookup) {
  for (const auto& [id, update] : plan.switches) {
    dataplane::Switch* sw = lookup(id);
    if (!sw) throw UnknownHost("no switch " + id);
    for (const auto& r : update.removes) {
      if (!sw->tables().Contains(r.table, r.entry)) {
        throw UnknownEntry("switch " + id + " has no " + dataplane::TableKindName(r.table) +
                           " entry " + dataplane::CanonicalKey(r.entry));
      }
    }
  }
  for (const auto& [id, update] : plan.switches) lookup(id)->ApplyUpdate(update);
}

std::vector<LabelInit> emit_label_init(const dataplane::DeploymentConfig& configs,
                                       const std::set<Ipv4>& hosts) {
  std::vector<LabelInit> out;
  auto make = [&](const std::string& sw, Ipv4 host, dataplane::ControlPayload payload) {
    if (!hosts.contains(host)) {
      throw UnknownHost("label init for " + host.ToString() + " which is not a host");
    }
    dataplane::SimPacket p;
    p.dst_ip = host;
    p.protocol = dataplane::Protocol::kUdp;
    p.control = std::move(payload);
    out.push_back({sw, std::move(p)});
  };
  for (const auto& [id, c] : configs) {
    for (const auto& init : c.init_packets) {
      make(id, init.host, {dataplane::ControlKind::kLabelHost, init.label, {}, {}});
    }
    for (const auto& f : c.file_inits) {
      make(id, f.host, {dataplane::ControlKind::kLabelFile, {}, f.path, f.tracker});
    }
  }
  return out;
}

PlacementReport placement_report(const dataplane::DeploymentConfig& configs,
                                 std::size_t total_rules,
                                 const std::vector<std::string>& switches) {
  PlacementReport report;
  report.total_rules = total_rules;
  std::vector<std::string> ids = switches;
  if (ids.empty()) {
    for (const auto& [id, c] : configs) ids.push_back(id);
  }
  double sum = 0;
  for (const auto& id : ids) {
    PlacementReport::Row row;
    row.switch_id = id;
    if (auto it = configs.find(id); it != configs.end()) {
      row.ternary = it->second.ternary_entries.size();
      row.exact = it->second.exact_entries.size();
      row.tracker = it->second.tracker_entries.size();
      row.privilege = it->second.privilege_entries.size();
    }
    row.reduction = total_rules == 0 ? 0.0
                                     : 1.0 - static_cast<double>(row.total()) /
                                                 static_cast<double>(total_rules);
    sum += row.reduction;
    report.rows.push_back(row);
  }
  report.average_reduction = ids.empty() ? 0.0 : sum / static_cast<double>(ids.size());
  return report;
}

std::string PlacementReport::ToTable() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %8s %9s %7s %10s\n", "switch", "ternary",
                "exact", "tracker", "privilege", "total", "reduction");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %8zu %8zu %8zu %9zu %7zu %9.1f%%\n",
                  r.switch_id.c_str(), r.ternary, r.exact, r.tracker, r.privilege, r.total(),
                  100.0 * r.reduction);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "rules %zu, average reduction %.1f%%\n", total_rules,
                100.0 * average_reduction);
  return out + buf;
}

}  // namespace difcnet::controlplane
