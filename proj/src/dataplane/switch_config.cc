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

#include "difcnet/dataplane/switch_config.h"

#include <algorithm>

#include "difcnet/core/errors.h"

namespace difcnet::dataplane {

std::vector<TableEntry>& SwitchConfig::entries(TableKind k) {
  switch (k) {
    case TableKind::kTernary:
      return ternary_entries;
    case TableKind::kExact:
      return exact_entries;
    case TableKind::kTracker:
      return tracker_entries;
    case TableKind::kPrivilege:
      return privilege_entries;
  }
  throw Error("TableError", "bad table kind");
}

const std::vector<TableEntry>& SwitchConfig::entries(TableKind k) const {
  return const_cast<SwitchConfig*>(this)->entries(k);
}

std::size_t UpdatePlan::add_count() const {
  std::size_t n = 0;
  for (const auto& [id, u] : switches) n += u.adds.size();
  return n;
}

std::size_t UpdatePlan::remove_count() const {
  std::size_t n = 0;
  for (const auto& [id, u] : switches) n += u.removes.size();
  return n;
}

std::string UpdatePlan::ToString() const {
  std::string out;
  for (const auto& [id, u] : switches) {
    for (const auto& r : u.removes) {
      out += id + " - " + TableKindName(r.table) + " " + CanonicalKey(r.entry) + "\n";
    }
    for (const auto& a : u.adds) {
      out += id + " + " + TableKindName(a.table) + " " + CanonicalKey(a.entry) + "\n";
    }
    if (u.address_sets) out += id + " ~ address sets\n";
  }
  return out;
}

void ApplyToConfig(SwitchConfig& config, const SwitchUpdate& update) {
  for (const auto& r : update.removes) {
    auto& t = config.entries(r.table);
    auto it = std::find(t.begin(), t.end(), r.entry);
    if (it == t.end()) {
      throw UnknownEntry("switch " + config.switch_id + " has no " +
                         TableKindName(r.table) + " entry " + CanonicalKey(r.entry));
    }
    t.erase(it);
  }
  for (const auto& a : update.adds) config.entries(a.table).push_back(a.entry);
  if (update.address_sets) config.address_sets = *update.address_sets;
  for (TableKind k : kAllTables) {
    auto& t = config.entries(k);
    std::stable_sort(t.begin(), t.end(), [](const TableEntry& x, const TableEntry& y) {
      return CanonicalKey(x) < CanonicalKey(y);
    });
  }
}

std::string DumpConfig(const SwitchConfig& config) {
  std::string out = "switch " + config.switch_id + "\n";
  for (const auto& [name, prefixes] : config.address_sets) {
    out += "  set " + name;
    for (const auto& p : prefixes) out += " " + p.ToString();
    out += "\n";
  }
  for (TableKind k : kAllTables) {
    std::vector<std::string> lines;
    for (const auto& e : config.entries(k)) lines.push_back(CanonicalKey(e));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out += "  " + TableKindName(k) + " " + l + "\n";
  }
  for (const auto& p : config.init_packets) {
    std::string hex;
    static constexpr char kDigits[] = "0123456789abcdef";
    for (std::uint8_t b : p.label.ToBytes()) {
      hex += kDigits[b >> 4];
      hex += kDigits[b & 0xf];
    }
    out += "  init " + p.host.ToString() + " " + hex + "\n";
  }
  for (const auto& f : config.file_inits) {
    out += "  file " + f.host.ToString() + " " + f.path + " tracker=" +
           std::to_string(f.tracker.value()) + "\n";
  }
  return out;
}

std::string DumpDeployment(const DeploymentConfig& configs) {
  std::string out;
  for (const auto& [id, c] : configs) out += DumpConfig(c);
  return out;
}

}  // namespace difcnet::dataplane
