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

#include "difcnet/dataplane/tables.h"

#include <algorithm>
#include <cstdio>

#include "difcnet/core/errors.h"

namespace difcnet::dataplane {
namespace {

std::string Hex(const core::Label& l) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : l.ToBytes()) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

bool ByPriority(const TableEntry& a, const TableEntry& b) {
  if (a.priority != b.priority) return a.priority < b.priority;
  return CanonicalKey(a) < CanonicalKey(b);
}

}  // namespace

std::string ActionKindName(ActionKind k) {
  switch (k) {
    case ActionKind::kDrop:
      return "drop";
    case ActionKind::kAllow:
      return "allow";
    case ActionKind::kReroute:
      return "reroute";
    case ActionKind::kModify:
      return "modify";
    case ActionKind::kAlert:
      return "alert";
    case ActionKind::kDeclassify:
      return "declassify";
    case ActionKind::kEndorse:
      return "endorse";
  }
  return "?";
}

std::string TableKindName(TableKind k) {
  switch (k) {
    case TableKind::kTernary:
      return "ternary";
    case TableKind::kExact:
      return "exact";
    case TableKind::kTracker:
      return "tracker";
    case TableKind::kPrivilege:
      return "privilege";
  }
  return "?";
}

bool AddressMatch::Matches(Ipv4 addr, const AddressSets& sets) const {
  bool hit = false;
  switch (kind) {
    case Kind::kAny:
      return true;
    case Kind::kHost:
      hit = addr == host;
      break;
    case Kind::kSet: {
      auto it = sets.find(set);
      if (it != sets.end()) {
        hit = std::any_of(it->second.begin(), it->second.end(),
                          [&](const Ipv4Prefix& p) { return p.Contains(addr); });
      }
      break;
    }
  }
  return hit != negate;
}

std::string AddressMatch::ToString() const {
  std::string op = negate ? "!=" : "==";
  switch (kind) {
    case Kind::kAny:
      return "*";
    case Kind::kHost:
      return op + host.ToString();
    case Kind::kSet:
      return op + "@" + set;
  }
  return "?";
}

bool TableEntry::Matches(const core::Label& label, core::TrackerId tracker_id,
                         const FlowKey& key, const AddressSets& sets) const {
  if ((label & label_mask) != label_value) return false;
  if (tracker.present() && ((tracker_id == tracker) == tracker_negate)) return false;
  return src.Matches(key.src_ip, sets) && dst.Matches(key.dst_ip, sets);
}

std::string CanonicalKey(const TableEntry& e) {
  char prio[16];
  std::snprintf(prio, sizeof prio, "%010u", e.priority);
  std::string out = std::string("prio=") + prio;
  if (!e.label_mask.empty()) {
    out += " mask=" + Hex(e.label_mask) + " value=" + Hex(e.label_value);
  }
  if (e.tracker.present()) {
    out += std::string(" tracker") + (e.tracker_negate ? "!=" : "==") +
           std::to_string(e.tracker.value());
  }
  out += " src" + e.src.ToString() + " dst" + e.dst.ToString();
  out += " action=" + ActionKindName(e.action.kind);
  switch (e.action.kind) {
    case ActionKind::kReroute:
      out += "(" + std::to_string(e.action.port) + ")";
      break;
    case ActionKind::kModify:
      out += std::string("(") + (e.action.field == ModifyField::kTtl ? "ttl" : "options") +
             "=" + e.action.value + ")";
      break;
    case ActionKind::kDeclassify:
    case ActionKind::kEndorse:
      out += "(" + Hex(e.action.tags) + ")";
      break;
    default:
      break;
  }
  return out;
}

std::string DescribeDecision(const Decision& d) {
  std::string out = ActionKindName(d.action.kind);
  if (d.action.kind == ActionKind::kReroute) out += ":" + std::to_string(d.action.port);
  return out;
}

std::vector<TableEntry>& PolicyTables::mutable_table(TableKind k) {
  switch (k) {
    case TableKind::kTernary:
      return ternary_;
    case TableKind::kExact:
      return exact_;
    case TableKind::kTracker:
      return tracker_;
    case TableKind::kPrivilege:
      return privilege_;
  }
  throw Error("TableError", "bad table kind");
}

const std::vector<TableEntry>& PolicyTables::table(TableKind k) const {
  return const_cast<PolicyTables*>(this)->mutable_table(k);
}

void PolicyTables::Add(TableKind table, TableEntry e) {
  auto& t = mutable_table(table);
  t.insert(std::upper_bound(t.begin(), t.end(), e, ByPriority), std::move(e));
}

bool PolicyTables::Remove(TableKind table, const TableEntry& e) {
  auto& t = mutable_table(table);
  auto it = std::find(t.begin(), t.end(), e);
  if (it == t.end()) return false;
  t.erase(it);
  return true;
}

bool PolicyTables::Contains(TableKind table, const TableEntry& e) const {
  const auto& t = this->table(table);
  return std::find(t.begin(), t.end(), e) != t.end();
}

MatchResult match_policies(const core::Label& label, core::TrackerId tracker,
                           const FlowKey& key, const PolicyTables& tables) {
  MatchResult result;
  const TableEntry* best = nullptr;
  for (TableKind kind : {TableKind::kTernary, TableKind::kExact, TableKind::kTracker}) {
    // Tables are priority-sorted, so the first hit is the table's best.
    for (const TableEntry& e : tables.table(kind)) {
      if (e.Matches(label, tracker, key, tables.address_sets())) {
        result.tables_hit.push_back(kind);
        if (!best || e.priority < best->priority) best = &e;
        break;
      }
    }
  }
  if (best) result.decision = Decision{best->action, best->priority};
  return result;
}

DifcHeader apply_privileges(const DifcHeader& header, const FlowKey& key,
                            const PolicyTables& tables) {
  DifcHeader out = header;
  for (const TableEntry& e : tables.table(TableKind::kPrivilege)) {
    if (!e.Matches(header.tags, header.tracker, key, tables.address_sets())) continue;
    // The switch holds exactly the capability its compiled entry grants.
    if (e.action.kind == ActionKind::kDeclassify) {
      out.tags = core::declassify_label(out.tags, e.action.tags, {{}, e.action.tags});
    } else if (e.action.kind == ActionKind::kEndorse) {
      out.tags = core::endorse_label(out.tags, e.action.tags, {e.action.tags, {}});
    }
  }
  return out;
}

}  // namespace difcnet::dataplane
