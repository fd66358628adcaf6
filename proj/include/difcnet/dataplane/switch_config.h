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

#ifndef DIFCNET_DATAPLANE_SWITCH_CONFIG_H_
#define DIFCNET_DATAPLANE_SWITCH_CONFIG_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/label.h"
#include "difcnet/dataplane/tables.h"

namespace difcnet::dataplane {

// Label initialization a switch sends to an adjacent host agent.
struct InitPacket {
  Ipv4 host;
  core::Label label;

  friend bool operator==(const InitPacket&, const InitPacket&) = default;
};

struct FileInit {
  Ipv4 host;
  std::string path;
  core::TrackerId tracker;

  friend bool operator==(const FileInit&, const FileInit&) = default;
};

// Everything the compiler hands to one switch daemon.
struct SwitchConfig {
  std::string switch_id;
  std::vector<TableEntry> ternary_entries;
  std::vector<TableEntry> exact_entries;
  std::vector<TableEntry> tracker_entries;
  std::vector<TableEntry> privilege_entries;
  std::vector<InitPacket> init_packets;
  std::vector<FileInit> file_inits;
  AddressSets address_sets;

  std::vector<TableEntry>& entries(TableKind k);
  const std::vector<TableEntry>& entries(TableKind k) const;
  std::size_t total_entries() const {
    return ternary_entries.size() + exact_entries.size() + tracker_entries.size() +
           privilege_entries.size();
  }

  friend bool operator==(const SwitchConfig&, const SwitchConfig&) = default;
};

using DeploymentConfig = std::map<std::string, SwitchConfig>;

inline constexpr TableKind kAllTables[] = {TableKind::kTernary, TableKind::kExact,
                                           TableKind::kTracker, TableKind::kPrivilege};

struct ConfigEntry {
  TableKind table;
  TableEntry entry;

  friend bool operator==(const ConfigEntry&, const ConfigEntry&) = default;
};

struct SwitchUpdate {
  std::vector<ConfigEntry> adds;
  std::vector<ConfigEntry> removes;
  // Replacement address sets, when they changed.
  std::optional<AddressSets> address_sets;
  bool empty() const { return adds.empty() && removes.empty() && !address_sets; }

  friend bool operator==(const SwitchUpdate&, const SwitchUpdate&) = default;
};

// Per-switch entry additions and removals. Switches with nothing to do are
// omitted.
struct UpdatePlan {
  std::map<std::string, SwitchUpdate> switches;

  bool empty() const { return switches.empty(); }
  std::size_t add_count() const;
  std::size_t remove_count() const;
  std::string ToString() const;
};

// Applies `update` to a config in place; removals must exist. Used by tests
// and by the CLI to check that a plan reproduces its target.
void ApplyToConfig(SwitchConfig& config, const SwitchUpdate& update);

// Canonical text dump: one line per entry, tables and entries in a fixed
// order. Identical configs always render identically.
std::string DumpConfig(const SwitchConfig& config);
std::string DumpDeployment(const DeploymentConfig& configs);

}  // namespace difcnet::dataplane

#endif  // DIFCNET_DATAPLANE_SWITCH_CONFIG_H_
