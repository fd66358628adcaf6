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

#include <array>
#include <utility>

#include "difcnet/core/errors.h"
#include "difcnet/hostagent/host_agent.h"

namespace difcnet::host {
namespace {

using K = HostEvent::Kind;

constexpr std::array<std::pair<K, const char*>, 13> kNames = {{
    {K::kIngress, "ingress"},
    {K::kAccept, "accept"},
    {K::kProcessCreate, "spawn"},
    {K::kProcessExit, "exit"},
    {K::kFileCreate, "create"},
    {K::kFileRead, "read"},
    {K::kFileWrite, "write"},
    {K::kFileDelete, "delete"},
    {K::kSend, "send"},
    {K::kEgress, "egress"},
    {K::kLabelAck, "label-ack"},
    {K::kReboot, "reboot"},
    {K::kCrash, "crash"},
}};

std::string Hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xf];
  }
  return out;
}

std::vector<std::uint8_t> Unhex(const std::string& s) {
  if (s.size() % 2) throw ScenarioError("odd-length hex '" + s + "'");
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(s.substr(i, 2), nullptr, 16)));
  }
  return out;
}

std::uint64_t Num(const TraceRecord& rec, const char* key) {
  std::string v = rec.Get(key);
  if (v.empty()) throw ScenarioError(rec.event + " event is missing '" + key + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ScenarioError("bad number for '" + std::string(key) + "': " + v);
  }
}

void AddFlow(TraceRecord& rec, const dataplane::FlowKey& k) {
  rec.Add("proto", dataplane::ProtocolName(k.protocol))
      .Add("src", k.src_ip.ToString())
      .Add("sport", std::to_string(k.src_port))
      .Add("dst", k.dst_ip.ToString())
      .Add("dport", std::to_string(k.dst_port));
}

dataplane::FlowKey ReadFlow(const TraceRecord& rec) {
  dataplane::FlowKey k;
  k.protocol = dataplane::ParseProtocol(rec.Get("proto"));
  k.src_ip = Ipv4::Parse(rec.Get("src"));
  k.src_port = static_cast<std::uint16_t>(Num(rec, "sport"));
  k.dst_ip = Ipv4::Parse(rec.Get("dst"));
  k.dst_port = static_cast<std::uint16_t>(Num(rec, "dport"));
  return k;
}

}  // namespace

std::string HostEventKindName(HostEvent::Kind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "?";
}

TraceRecord FormatHostEvent(const HostEvent& ev, const std::string& host) {
  TraceRecord rec{ev.time, host, HostEventKindName(ev.kind), {}};
  switch (ev.kind) {
    case K::kIngress:
    case K::kEgress: {
      const dataplane::SimPacket& p = *ev.packet;
      AddFlow(rec, p.key());
      rec.Add("flags", std::to_string(p.tcp_flags))
          .Add("icmp", std::to_string(static_cast<int>(p.icmp_kind)));
      if (p.labeled()) rec.Add("difc", Hex(p.difc_wire));
      break;
    }
    case K::kAccept:
      rec.Add("pid", std::to_string(ev.pid)).Add("port", std::to_string(ev.port));
      break;
    case K::kSend:
      rec.Add("pid", std::to_string(ev.pid)).Add("port", std::to_string(ev.port));
      break;
    case K::kProcessCreate:
      rec.Add("pid", std::to_string(ev.pid)).Add("child", std::to_string(ev.child));
      break;
    case K::kProcessExit:
      rec.Add("pid", std::to_string(ev.pid));
      break;
    case K::kFileCreate:
      rec.Add("pid", std::to_string(ev.pid)).Add("inode", std::to_string(ev.inode));
      if (!ev.path.empty()) rec.Add("path", ev.path);
      break;
    case K::kFileRead:
    case K::kFileWrite:
      rec.Add("pid", std::to_string(ev.pid)).Add("inode", std::to_string(ev.inode));
      break;
    case K::kFileDelete:
      rec.Add("inode", std::to_string(ev.inode));
      break;
    case K::kLabelAck:
      AddFlow(rec, ev.flow);
      break;
    case K::kReboot:
    case K::kCrash:
      break;
  }
  return rec;
}

HostEvent ParseHostEvent(const TraceRecord& rec) {
  HostEvent ev;
  ev.time = rec.time;
  bool found = false;
  for (const auto& [kind, name] : kNames) {
    if (rec.event == name) {
      ev.kind = kind;
      found = true;
    }
  }
  if (!found) throw ScenarioError("unknown host event '" + rec.event + "'");
  switch (ev.kind) {
    case K::kIngress:
    case K::kEgress: {
      dataplane::SimPacket p;
      dataplane::FlowKey k = ReadFlow(rec);
      p.src_ip = k.src_ip;
      p.src_port = k.src_port;
      p.dst_ip = k.dst_ip;
      p.dst_port = k.dst_port;
      p.protocol = k.protocol;
      if (!rec.Get("flags").empty()) p.tcp_flags = static_cast<std::uint8_t>(Num(rec, "flags"));
      if (!rec.Get("icmp").empty()) {
        p.icmp_kind = static_cast<dataplane::IcmpKind>(Num(rec, "icmp"));
      }
      if (std::string d = rec.Get("difc"); !d.empty()) {
        p.difc_wire = Unhex(d);
        p.evil_bit = true;
      }
      ev.packet = std::move(p);
      break;
    }
    case K::kAccept:
    case K::kSend:
      ev.pid = static_cast<Pid>(Num(rec, "pid"));
      ev.port = static_cast<std::uint16_t>(Num(rec, "port"));
      break;
    case K::kProcessCreate:
      ev.pid = static_cast<Pid>(Num(rec, "pid"));
      ev.child = static_cast<Pid>(Num(rec, "child"));
      break;
    case K::kProcessExit:
      ev.pid = static_cast<Pid>(Num(rec, "pid"));
      break;
    case K::kFileCreate:
      ev.path = rec.Get("path");
      [[fallthrough]];
    case K::kFileRead:
    case K::kFileWrite:
      ev.pid = static_cast<Pid>(Num(rec, "pid"));
      ev.inode = Num(rec, "inode");
      break;
    case K::kFileDelete:
      ev.inode = Num(rec, "inode");
      break;
    case K::kLabelAck:
      ev.flow = ReadFlow(rec);
      break;
    case K::kReboot:
    case K::kCrash:
      break;
  }
  return ev;
}

}  // namespace difcnet::host
