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

#ifndef DIFCNET_NETCL_AST_H_
#define DIFCNET_NETCL_AST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"

namespace difcnet::netcl {

// Host reference in a directive or an address comparison. Either a literal
// address or a name resolved against the topology bindings.
struct HostRef {
  enum class Kind : std::uint8_t { kIp, kName };
  Kind kind = Kind::kName;
  Ipv4 ip;
  std::string name;

  static HostRef Ip(Ipv4 a) { return {Kind::kIp, a, {}}; }
  static HostRef Name(std::string n) { return {Kind::kName, {}, std::move(n)}; }
  std::string ToString() const { return kind == Kind::kIp ? ip.ToString() : name; }

  friend bool operator==(const HostRef&, const HostRef&) = default;
};

struct LabelDirective {
  enum class Kind : std::uint8_t { kLabelHost, kLabelFile };
  Kind kind = Kind::kLabelHost;
  HostRef host;
  std::vector<std::string> tags;  // kLabelHost
  std::string file_path;          // kLabelFile

  friend bool operator==(const LabelDirective&, const LabelDirective&) = default;
};

enum class Field : std::uint8_t { kSrcIp, kDstIp, kPktLabel, kTrackerId };
enum class CmpOp : std::uint8_t { kEq, kNeq, kContains };

std::string FieldName(Field f);

struct Value {
  enum class Kind : std::uint8_t {
    kAny,      // any
    kHost,     // IP literal or bound name
    kHostSet,  // {A, B, 10.0.0.1}
    kTagSet,   // pkt_label contains X  /  contains {X, Y}
    kTracker,  // /path@Host
  };
  Kind kind = Kind::kAny;
  HostRef host;                  // kHost, kTracker
  std::vector<HostRef> hosts;    // kHostSet
  std::vector<std::string> tags; // kTagSet
  std::string path;              // kTracker

  friend bool operator==(const Value&, const Value&) = default;
};

struct Comparison {
  Field field = Field::kDstIp;
  CmpOp op = CmpOp::kEq;
  Value value;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct RuleAction {
  enum class Kind : std::uint8_t {
    kDrop,
    kAllow,
    kReroute,
    kModify,
    kAlert,
    kDeclassify,
    kEndorse,
  };
  Kind kind = Kind::kDrop;
  std::uint16_t port = 0;
  // modify(<field>=<value>); the field name is checked by the compiler.
  std::string field;
  std::string value;
  std::vector<std::string> tags;

  friend bool operator==(const RuleAction&, const RuleAction&) = default;
};

struct PolicyRule {
  std::vector<Comparison> predicate;
  RuleAction action;

  bool uses_contains() const;
  bool uses_tracker() const;
  const Comparison* Find(Field f) const;

  friend bool operator==(const PolicyRule&, const PolicyRule&) = default;
};

// Rule i (0-based) has priority i + 1. Everything unmatched is dropped.
struct Program {
  std::vector<LabelDirective> labelings;
  std::vector<PolicyRule> policies;

  static std::uint32_t PriorityOf(std::size_t index) {
    return static_cast<std::uint32_t>(index + 1);
  }

  friend bool operator==(const Program&, const Program&) = default;
};

}  // namespace difcnet::netcl

#endif  // DIFCNET_NETCL_AST_H_
