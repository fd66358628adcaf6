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

#ifndef DIFCNET_DATAPLANE_TABLES_H_
#define DIFCNET_DATAPLANE_TABLES_H_

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/label.h"
#include "difcnet/dataplane/header.h"
#include "difcnet/dataplane/packet.h"

namespace difcnet::dataplane {

enum class ActionKind : std::uint8_t {
  kDrop,
  kAllow,
  kReroute,
  kModify,
  kAlert,
  kDeclassify,
  kEndorse,
};

std::string ActionKindName(ActionKind k);

enum class ModifyField : std::uint8_t { kTtl, kOptions };

struct Action {
  ActionKind kind = ActionKind::kDrop;
  // kReroute
  std::uint16_t port = 0;
  // kModify; `value` is decimal for TTL and lowercase hex for options.
  ModifyField field = ModifyField::kTtl;
  std::string value;
  // kDeclassify / kEndorse
  core::TagMask tags;

  static Action Drop() { return {}; }
  static Action Allow() {
    Action a;
    a.kind = ActionKind::kAllow;
    return a;
  }
  bool is_privilege() const {
    return kind == ActionKind::kDeclassify || kind == ActionKind::kEndorse;
  }
  bool forwards() const { return kind != ActionKind::kDrop; }

  friend bool operator==(const Action&, const Action&) = default;
};

// Named address sets referenced by table entries (`Servers_Floor`,
// `external_network`, ...).
using AddressSets = std::map<std::string, std::vector<Ipv4Prefix>, std::less<>>;

struct AddressMatch {
  enum class Kind : std::uint8_t { kAny, kHost, kSet };
  Kind kind = Kind::kAny;
  Ipv4 host;
  std::string set;
  bool negate = false;

  static AddressMatch Any() { return {}; }
  static AddressMatch Host(Ipv4 a, bool negate = false) {
    return {Kind::kHost, a, {}, negate};
  }
  static AddressMatch Set(std::string name, bool negate = false) {
    return {Kind::kSet, {}, std::move(name), negate};
  }

  bool Matches(Ipv4 addr, const AddressSets& sets) const;
  std::string ToString() const;

  friend bool operator==(const AddressMatch&, const AddressMatch&) = default;
};

inline constexpr std::uint32_t kDefaultDenyPriority =
    std::numeric_limits<std::uint32_t>::max();

// One compiled policy. Lower `priority` wins.
struct TableEntry {
  // Ternary pattern: label L matches iff (L & label_mask) == label_value.
  core::TagMask label_mask;
  core::Label label_value;
  core::TrackerId tracker;  // absent = wildcard
  bool tracker_negate = false;
  AddressMatch src;
  AddressMatch dst;
  Action action;
  std::uint32_t priority = 0;

  bool Matches(const core::Label& label, core::TrackerId tracker_id,
               const FlowKey& key, const AddressSets& sets) const;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

// Total, deterministic text form of an entry. Used for canonical dumps,
// ordering and structural diffing.
std::string CanonicalKey(const TableEntry& e);

enum class TableKind : std::uint8_t { kTernary, kExact, kTracker, kPrivilege };
std::string TableKindName(TableKind k);

struct Decision {
  Action action;
  std::uint32_t source_priority = kDefaultDenyPriority;

  static Decision DefaultDeny() { return {}; }
  bool is_default() const { return source_priority == kDefaultDenyPriority; }

  friend bool operator==(const Decision&, const Decision&) = default;
};

std::string DescribeDecision(const Decision& d);

struct MatchResult {
  Decision decision;
  // Tables that produced at least one hit, in kind order.
  std::vector<TableKind> tables_hit;
};

// The three flow-matching tables plus the privilege table of one switch.
// Entries inside each table are kept sorted by priority.
class PolicyTables {
 public:
  void Add(TableKind table, TableEntry e);
  // Returns false when no structurally equal entry is installed.
  bool Remove(TableKind table, const TableEntry& e);
  bool Contains(TableKind table, const TableEntry& e) const;

  const std::vector<TableEntry>& table(TableKind k) const;
  std::size_t size(TableKind k) const { return table(k).size(); }

  AddressSets& address_sets() { return sets_; }
  const AddressSets& address_sets() const { return sets_; }

  friend bool operator==(const PolicyTables&, const PolicyTables&) = default;

 private:
  std::vector<TableEntry>& mutable_table(TableKind k);

  std::vector<TableEntry> ternary_;
  std::vector<TableEntry> exact_;
  std::vector<TableEntry> tracker_;
  std::vector<TableEntry> privilege_;
  AddressSets sets_;
};

// Evaluates the ternary, exact, and tracker tables independently and returns
// the highest-priority hit across all three, or the default deny.
MatchResult match_policies(const core::Label& label, core::TrackerId tracker,
                           const FlowKey& key, const PolicyTables& tables);

// Declassify entries clear their mask, endorse entries set it; every entry
// that matches the incoming header applies, in priority order. The tracker
// is never touched.
DifcHeader apply_privileges(const DifcHeader& header, const FlowKey& key,
                            const PolicyTables& tables);

}  // namespace difcnet::dataplane

#endif  // DIFCNET_DATAPLANE_TABLES_H_
