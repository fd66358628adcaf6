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

#include "difcnet/dataplane/switch.h"

#include <algorithm>

#include "difcnet/core/errors.h"

namespace difcnet::dataplane {
namespace {

std::string TablesHit(const std::vector<TableKind>& hit) {
  if (hit.empty()) return "-";
  std::string out;
  for (TableKind k : hit) {
    if (!out.empty()) out += ",";
    out += TableKindName(k);
  }
  return out;
}

void ApplyModify(SimPacket& pkt, const Action& a) {
  if (a.field == ModifyField::kTtl) {
    pkt.ttl = static_cast<std::uint8_t>(std::stoul(a.value));
    return;
  }
  pkt.ip_options.clear();
  for (std::size_t i = 0; i + 1 < a.value.size(); i += 2) {
    pkt.ip_options.push_back(
        static_cast<std::uint8_t>(std::stoul(a.value.substr(i, 2), nullptr, 16)));
  }
}

}  // namespace

std::string StageName(Stage s) {
  switch (s) {
    case Stage::kControl:
      return "control";
    case Stage::kTransit:
      return "transit";
    case Stage::kConnDec:
      return "conndec";
    case Stage::kBuffer:
      return "buffer";
    case Stage::kPolicy:
      return "policy";
    case Stage::kThrottled:
      return "throttled";
    case Stage::kMalformed:
      return "malformed";
    case Stage::kRecirculate:
      return "recirculate";
    case Stage::kRecircExhausted:
      return "recirc-exhausted";
    case Stage::kNoRoute:
      return "no-route";
  }
  return "?";
}

bool PipelineResult::forwarded() const {
  return std::any_of(emitted.begin(), emitted.end(),
                     [](const Emission& e) { return e.kind == Emission::Kind::kForward; });
}

TraceRecord PipelineResult::ToTrace(SimTime now, const std::string& node,
                                    const SimPacket& pkt) const {
  TraceRecord rec{now, node, "switch", {}};
  rec.Add("pkt", std::to_string(pkt.id))
      .Add("flow", pkt.key().ToString())
      .Add("stage", StageName(stage));
  if (stage != Stage::kTransit && stage != Stage::kControl) {
    std::string verdict = stage == Stage::kRecirculate ? "pending" : DescribeDecision(decision);
    rec.Add("verdict", verdict);
    rec.Add("prio", decision.is_default() ? "default"
                                          : std::to_string(decision.source_priority));
    rec.Add("tables", TablesHit(tables_hit));
  }
  if (alert) rec.Add("alert", "1");
  return rec;
}

Switch::Switch(std::string id, SwitchOptions opts)
    : id_(std::move(id)),
      opts_(opts),
      buffer_(opts.buffer_index_bits),
      conndec_(opts.conndec_capacity),
      limiter_(opts.rate_limit) {}

bool Switch::IsLocal(Ipv4 addr) const {
  return std::any_of(local_.begin(), local_.end(),
                     [&](const Ipv4Prefix& p) { return p.Contains(addr); });
}

void Switch::AddRoute(const Ipv4Prefix& prefix, std::uint16_t port) {
  routes_.emplace_back(prefix, port);
  // Longest prefix first; stable so equal lengths keep insertion order.
  std::stable_sort(routes_.begin(), routes_.end(),
                   [](const auto& a, const auto& b) { return a.first.length > b.first.length; });
}

std::optional<std::uint16_t> Switch::Route(Ipv4 dst) const {
  for (const auto& [prefix, port] : routes_) {
    if (prefix.Contains(dst)) return port;
  }
  return std::nullopt;
}

bool Switch::HasPort(std::uint16_t port) const {
  return std::any_of(routes_.begin(), routes_.end(),
                     [&](const auto& r) { return r.second == port; });
}

void Switch::LoadConfig(const SwitchConfig& config) {
  PolicyTables fresh;
  fresh.address_sets() = config.address_sets;
  for (TableKind k : kAllTables) {
    for (const auto& e : config.entries(k)) fresh.Add(k, e);
  }
  tables_ = std::move(fresh);
}

void Switch::ApplyUpdate(const SwitchUpdate& update) {
  PolicyTables next = tables_;
  for (const auto& r : update.removes) {
    if (!next.Remove(r.table, r.entry)) {
      throw UnknownEntry("switch " + id_ + " has no " + TableKindName(r.table) +
                         " entry " + CanonicalKey(r.entry));
    }
  }
  for (const auto& a : update.adds) next.Add(a.table, a.entry);
  if (update.address_sets) next.address_sets() = *update.address_sets;
  tables_ = std::move(next);
}

PipelineResult Switch::Forward(SimPacket pkt, Stage stage) {
  PipelineResult r;
  r.stage = stage;
  auto port = Route(pkt.dst_ip);
  if (!port) {
    r.stage = Stage::kNoRoute;
    return r;
  }
  r.emitted.push_back({Emission::Kind::kForward, std::move(pkt), *port, 0});
  return r;
}

SimPacket Switch::LabelAck(const SimPacket& pkt) const {
  SimPacket ack;
  ack.src_ip = pkt.dst_ip;
  ack.dst_ip = pkt.src_ip;
  ack.src_port = pkt.dst_port;
  ack.dst_port = pkt.src_port;
  ack.protocol = pkt.protocol;
  ack.control = ControlPayload{ControlKind::kLabelAck, {}, {}, {}};
  return ack;
}

void Switch::Execute(PipelineResult& r, SimPacket pkt) {
  const Action& a = r.decision.action;
  if (!a.forwards()) return;
  std::optional<std::uint16_t> port;
  if (a.kind == ActionKind::kReroute) {
    if (HasPort(a.port)) port = a.port;
  } else {
    port = Route(pkt.dst_ip);
  }
  if (!port) {
    r.stage = Stage::kNoRoute;
    r.decision = Decision::DefaultDeny();
    return;
  }
  if (a.kind == ActionKind::kModify) ApplyModify(pkt, a);
  if (a.kind == ActionKind::kAlert) r.alert = true;
  pkt.enforced = true;
  r.emitted.push_back({Emission::Kind::kForward, std::move(pkt), *port, 0});
}

PipelineResult Switch::Recirculate(SimPacket pkt) {
  PipelineResult r;
  if (pkt.recirculations >= opts_.max_recirculations) {
    r.stage = Stage::kRecircExhausted;
    return r;
  }
  r.stage = Stage::kRecirculate;
  ++pkt.recirculations;
  r.emitted.push_back(
      {Emission::Kind::kRecirculate, std::move(pkt), 0, opts_.recirculation_delay});
  return r;
}

PipelineResult Switch::Process(SimPacket pkt, SimTime now) {
  if (pkt.control || pkt.enforced) {
    return Forward(std::move(pkt), pkt.control ? Stage::kControl : Stage::kTransit);
  }
  const FlowKey key = pkt.key();

  if (!IsLocal(key.dst_ip)) {
    // Replies of a connection decided here leave through this switch first.
    if (!pkt.labeled() && IsLocal(key.src_ip)) {
      const FlowKey rev = key.Reversed();
      std::optional<Decision> d = conndec_.Lookup(rev, now);
      Stage stage = Stage::kConnDec;
      if (!d) {
        d = buffer_.Lookup(rev);
        stage = Stage::kBuffer;
      }
      if (d) {
        PipelineResult r;
        r.stage = stage;
        r.decision = *d;
        Execute(r, std::move(pkt));
        return r;
      }
      // A connection response can only belong to a flow decided here, so
      // wait for the install instead of letting it leave undecided.
      const bool response =
          (pkt.protocol == Protocol::kTcp && (pkt.tcp_flags & tcp::kSyn) &&
           (pkt.tcp_flags & tcp::kAck)) ||
          (pkt.protocol == Protocol::kIcmp && pkt.icmp_kind == IcmpKind::kReply);
      if (response) return Recirculate(std::move(pkt));
    }
    return Forward(std::move(pkt), Stage::kTransit);
  }

  PipelineResult r;
  if (pkt.labeled()) {
    const bool udp = pkt.protocol == Protocol::kUdp;
    if (auto d = conndec_.Lookup(key, now)) {
      // ConnDec wins over a late label; the label is ignored.
      r.stage = Stage::kConnDec;
      r.decision = *d;
      if (udp) r.emitted.push_back({Emission::Kind::kGeneratedAck, LabelAck(pkt), 0, 0});
      Execute(r, std::move(pkt));
      return r;
    }
    DifcHeader in;
    try {
      in = pkt.header();
    } catch (const MalformedHeader&) {
      r.stage = Stage::kMalformed;
      return r;
    }
    r.header_in = in;
    DifcHeader out = apply_privileges(in, key, tables_);
    if (auto d = buffer_.Lookup(key)) {
      r.stage = Stage::kBuffer;
      r.decision = *d;
    } else {
      if (limiter_.Check(key.src_ip, now) == RateVerdict::kThrottle) {
        r.stage = Stage::kThrottled;
        return r;
      }
      MatchResult m = match_policies(out.tags, out.tracker, key, tables_);
      r.stage = Stage::kPolicy;
      r.decision = m.decision;
      r.tables_hit = std::move(m.tables_hit);
      buffer_.Insert(key, r.decision, now);
      r.requests.push_back({id_, key, r.decision, now});
    }
    r.header_out = out;
    if (out != in) pkt.AttachHeader(out);
    if (udp) r.emitted.push_back({Emission::Kind::kGeneratedAck, LabelAck(pkt), 0, 0});
    Execute(r, std::move(pkt));
    return r;
  }

  const FlowKey rev = key.Reversed();
  std::optional<Decision> d = conndec_.Lookup(key, now);
  if (!d) d = conndec_.Lookup(rev, now);
  if (d) {
    r.stage = Stage::kConnDec;
  } else {
    d = buffer_.Lookup(key);
    if (!d) d = buffer_.Lookup(rev);
    if (!d) return Recirculate(std::move(pkt));
    r.stage = Stage::kBuffer;
  }
  r.decision = *d;
  Execute(r, std::move(pkt));
  return r;
}

}  // namespace difcnet::dataplane
