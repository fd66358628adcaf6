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

#include "difcnet/hostagent/host_agent.h"

#include <zlib.h>

#include <cstring>

#include "difcnet/core/errors.h"

namespace difcnet::host {

using dataplane::ControlKind;
using dataplane::FlowKey;
using dataplane::Protocol;
using dataplane::SimPacket;

namespace {

constexpr char kMagic[8] = {'D', 'I', 'F', 'C', 'S', 'N', 'A', 'P'};
constexpr std::uint16_t kSnapshotVersion = 1;

std::string LabelIds(const core::Label& l) {
  if (l.empty()) return "-";
  std::string out;
  for (core::TagId t : l.tags()) {
    if (!out.empty()) out += ",";
    out += std::to_string(t.index());
  }
  return out;
}

class Writer {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U16(std::uint16_t v) {
    U8(static_cast<std::uint8_t>(v >> 8));
    U8(static_cast<std::uint8_t>(v));
  }
  void U32(std::uint32_t v) {
    U16(static_cast<std::uint16_t>(v >> 16));
    U16(static_cast<std::uint16_t>(v));
  }
  void U64(std::uint64_t v) {
    U32(static_cast<std::uint32_t>(v >> 32));
    U32(static_cast<std::uint32_t>(v));
  }
  void Bytes(const void* p, std::size_t n) {
    auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void Label(const core::Label& l) {
    auto bytes = l.ToBytes();
    Bytes(bytes.data(), bytes.size());
  }
  void String(const std::string& s) {
    U16(static_cast<std::uint16_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& out() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  void Need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CorruptSnapshot("truncated snapshot");
  }
  std::uint8_t U8() {
    Need(1);
    return in_[pos_++];
  }
  std::uint16_t U16() { return static_cast<std::uint16_t>((U8() << 8) | U8()); }
  std::uint32_t U32() {
    std::uint32_t hi = U16();
    return (hi << 16) | U16();
  }
  std::uint64_t U64() {
    std::uint64_t hi = U32();
    return (hi << 32) | U32();
  }
  core::Label Label() {
    Need(32);
    core::Label l = core::Label::FromBytes(in_.data() + pos_);
    pos_ += 32;
    return l;
  }
  std::string String() {
    std::uint16_t n = U16();
    Need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t Crc(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(crc32(0L, data, static_cast<uInt>(n)));
}

}  // namespace

HostAgent::HostAgent(std::string name, Ipv4 ip, core::Label default_label,
                     HostAgentOptions opts)
    : name_(std::move(name)), ip_(ip), default_label_(default_label), opts_(opts) {
  state_.host_label = default_label_;
}

Tagged HostAgent::PidLabel(Pid pid) const {
  auto it = state_.pid_labels.find(pid);
  if (it != state_.pid_labels.end()) return it->second;
  return {state_.host_label, {}};
}

std::string HostAgent::PidEntity(Pid pid) const {
  auto it = pid_gen_.find(pid);
  return "pid:" + name_ + ":" + std::to_string(pid) + "#" +
         std::to_string(it == pid_gen_.end() ? 0 : it->second);
}

std::string HostAgent::FileEntity(Inode inode) const {
  auto it = file_gen_.find(inode);
  return "file:" + name_ + ":" + std::to_string(inode) + "#" +
         std::to_string(it == file_gen_.end() ? 0 : it->second);
}

TraceRecord& HostAgent::Log(SimTime now, std::string event) {
  log_.push_back({now, name_, std::move(event), {}});
  return log_.back();
}

void HostAgent::Edge(SimTime now, const std::string& event, const std::string& from,
                     const std::string& to, const Tagged& tag) {
  Log(now, event)
      .Add("from", from)
      .Add("to", to)
      .Add("label", LabelIds(tag.label))
      .Add("tracker", std::to_string(tag.tracker.value()));
}

void HostAgent::Adopt(Tagged& dst, const Tagged& src, const std::string& who, SimTime now) {
  dst.label = core::merge(src.label, dst.label);
  if (src.tracker.present() && dst.tracker.present() && src.tracker != dst.tracker) {
    Log(now, "tracker-overwrite")
        .Add("entity", who)
        .Add("old", std::to_string(dst.tracker.value()))
        .Add("new", std::to_string(src.tracker.value()));
  }
  dst.tracker = core::adopt_tracker(src.tracker, dst.tracker);
}

void HostAgent::ExpireInLabels(SimTime now) {
  std::erase_if(state_.in_labels,
                [&](const auto& kv) { return now - kv.second.at > opts_.in_label_ttl; });
}

void HostAgent::ApplyControl(const dataplane::ControlPayload& c, SimTime now) {
  switch (c.kind) {
    case ControlKind::kLabelAck:
      break;
    case ControlKind::kLabelHost:
      state_.host_label = c.label;
      for (auto& [pid, t] : state_.pid_labels) t.label = c.label;
      for (auto& [inode, t] : state_.file_labels) t.label = c.label;
      Log(now, "label-host").Add("label", LabelIds(c.label));
      break;
    case ControlKind::kLabelFile: {
      auto it = state_.file_paths.find(c.file_path);
      if (it != state_.file_paths.end() && state_.file_labels.contains(it->second)) {
        state_.file_labels[it->second].tracker = c.tracker;
      } else {
        state_.pending_trackers[c.file_path] = c.tracker;
      }
      Log(now, "label-file")
          .Add("path", c.file_path)
          .Add("tracker", std::to_string(c.tracker.value()));
      break;
    }
  }
}

std::optional<SimPacket> HostAgent::on_ingress(SimPacket pkt, SimTime now,
                                               std::string origin) {
  ExpireInLabels(now);
  if (pkt.control) {
    if (pkt.control->kind == ControlKind::kLabelAck) {
      on_label_ack(pkt.key().Reversed(), now);
    } else {
      ApplyControl(*pkt.control, now);
    }
    return std::nullopt;
  }
  if (!pkt.labeled()) return pkt;
  dataplane::DifcHeader h;
  try {
    h = pkt.header();
  } catch (const MalformedHeader& e) {
    Log(now, "malformed").Add("flow", pkt.key().ToString());
    return std::nullopt;
  }
  if (origin.empty()) origin = "flow:" + pkt.key().ToString();
  if (state_.in_labels.contains(pkt.dst_port)) {
    Log(now, "in-label-overwrite").Add("port", std::to_string(pkt.dst_port));
  }
  state_.in_labels[pkt.dst_port] = {{h.tags, h.tracker}, now, origin};
  pkt.StripHeader();
  return pkt;
}

void HostAgent::on_accept(Pid pid, std::uint16_t dport, SimTime now) {
  ExpireInLabels(now);
  auto it = state_.in_labels.find(dport);
  if (it == state_.in_labels.end()) return;
  HostState::InLabel in = std::move(it->second);
  state_.in_labels.erase(it);
  Tagged t = PidLabel(pid);
  Adopt(t, in.tag, PidEntity(pid), now);
  state_.pid_labels[pid] = t;
  Edge(now, "accept", in.origin, PidEntity(pid), t);
}

void HostAgent::on_process_create(Pid parent, Pid child, SimTime now) {
  if (state_.pid_labels.contains(child)) {
    throw PidReuseViolation(name_ + ": pid " + std::to_string(child) + " is still alive");
  }
  ++pid_gen_[child];
  Tagged t = PidLabel(parent);
  state_.pid_labels[child] = t;
  Edge(now, "spawn", PidEntity(parent), PidEntity(child), t);
}

void HostAgent::on_process_exit(Pid pid, SimTime now) {
  if (state_.pid_labels.erase(pid)) Log(now, "exit").Add("pid", std::to_string(pid));
}

void HostAgent::on_file_create(Pid pid, Inode inode, SimTime now, const std::string& path) {
  ++file_gen_[inode];
  Tagged t = PidLabel(pid);
  if (!path.empty()) {
    state_.file_paths[path] = inode;
    if (auto it = state_.pending_trackers.find(path); it != state_.pending_trackers.end()) {
      t.tracker = it->second;
      state_.pending_trackers.erase(it);
    }
  }
  state_.file_labels[inode] = t;
  Edge(now, "create", PidEntity(pid), FileEntity(inode), t);
}

void HostAgent::on_file_read(Pid pid, Inode inode, SimTime now) {
  auto it = state_.file_labels.find(inode);
  if (it == state_.file_labels.end()) {
    throw UnknownInode(name_ + ": read of unknown inode " + std::to_string(inode));
  }
  Tagged t = PidLabel(pid);
  Adopt(t, it->second, PidEntity(pid), now);
  state_.pid_labels[pid] = t;
  Edge(now, "read", FileEntity(inode), PidEntity(pid), t);
}

void HostAgent::on_file_write(Pid pid, Inode inode, SimTime now) {
  auto it = state_.file_labels.find(inode);
  if (it == state_.file_labels.end()) {
    throw UnknownInode(name_ + ": write to unknown inode " + std::to_string(inode));
  }
  Adopt(it->second, PidLabel(pid), FileEntity(inode), now);
  Edge(now, "write", PidEntity(pid), FileEntity(inode), it->second);
}

void HostAgent::on_file_delete(Inode inode, SimTime now) {
  if (!state_.file_labels.erase(inode)) return;
  std::erase_if(state_.file_paths, [&](const auto& kv) { return kv.second == inode; });
  Log(now, "delete").Add("inode", std::to_string(inode));
}

void HostAgent::on_send(Pid pid, std::uint16_t sport, SimTime now) {
  if (state_.out_labels.contains(sport)) {
    Log(now, "out-label-overwrite").Add("port", std::to_string(sport));
  }
  state_.out_labels[sport] = PidLabel(pid);
  out_origin_[sport] = PidEntity(pid);
}

SimPacket HostAgent::on_egress(SimPacket pkt, SimTime now) {
  const FlowKey key = pkt.key();
  std::optional<Tagged> tag;
  auto out = state_.out_labels.find(pkt.src_port);
  switch (pkt.protocol) {
    case Protocol::kTcp:
      if (pkt.is_syn() && out != state_.out_labels.end()) tag = out->second;
      break;
    case Protocol::kUdp: {
      unsigned& sent = state_.udp_pending[key];
      if (sent < opts_.udp_label_prefix && !state_.udp_acked.contains(key)) {
        ++sent;
        tag = out != state_.out_labels.end() ? out->second : Tagged{state_.host_label, {}};
      }
      break;
    }
    case Protocol::kIcmp:
      if (pkt.icmp_kind == dataplane::IcmpKind::kRequest ||
          pkt.icmp_kind == dataplane::IcmpKind::kReply) {
        tag = out != state_.out_labels.end() ? out->second : Tagged{state_.host_label, {}};
      }
      break;
  }
  if (!tag) return pkt;
  pkt.AttachHeader({tag->label, tag->tracker});
  auto origin = out_origin_.find(pkt.src_port);
  std::string from = origin != out_origin_.end() && out != state_.out_labels.end()
                         ? origin->second
                         : "host:" + name_;
  Edge(now, "egress", from, "flow:" + key.ToString(), *tag);
  return pkt;
}

void HostAgent::on_label_ack(const FlowKey& flow, SimTime now) {
  if (state_.udp_acked.insert(flow).second) {
    Log(now, "label-ack").Add("flow", flow.ToString());
  }
}

std::vector<std::uint8_t> HostAgent::snapshot() const {
  Writer w;
  w.Bytes(kMagic, sizeof kMagic);
  w.U16(kSnapshotVersion);
  w.Label(state_.host_label);
  w.Label(state_.caps.plus);
  w.Label(state_.caps.minus);
  w.U32(static_cast<std::uint32_t>(state_.file_labels.size()));
  for (const auto& [inode, t] : state_.file_labels) {
    w.U64(inode);
    w.Label(t.label);
    w.U32(t.tracker.value());
  }
  w.U32(static_cast<std::uint32_t>(state_.file_paths.size()));
  for (const auto& [path, inode] : state_.file_paths) {
    w.String(path);
    w.U64(inode);
  }
  w.U32(static_cast<std::uint32_t>(state_.pending_trackers.size()));
  for (const auto& [path, tracker] : state_.pending_trackers) {
    w.String(path);
    w.U32(tracker.value());
  }
  w.U32(Crc(w.out().data(), w.out().size()));
  return std::move(w.out());
}

void HostAgent::restore(std::span<const std::uint8_t> blob) {
  if (blob.size() < sizeof kMagic + 2 + 4) throw CorruptSnapshot("snapshot too short");
  if (std::memcmp(blob.data(), kMagic, sizeof kMagic) != 0) {
    throw CorruptSnapshot("bad snapshot magic");
  }
  const std::size_t body = blob.size() - 4;
  Reader crc_reader(blob.subspan(body));
  if (crc_reader.U32() != Crc(blob.data(), body)) throw CorruptSnapshot("checksum mismatch");

  Reader r(blob.first(body));
  for (std::size_t i = 0; i < sizeof kMagic; ++i) r.U8();
  std::uint16_t version = r.U16();
  if (version != kSnapshotVersion) {
    throw CorruptSnapshot("unsupported snapshot version " + std::to_string(version));
  }
  HostState s;
  s.host_label = r.Label();
  s.caps.plus = r.Label();
  s.caps.minus = r.Label();
  for (std::uint32_t n = r.U32(); n > 0; --n) {
    Inode inode = r.U64();
    Tagged t;
    t.label = r.Label();
    t.tracker = core::TrackerId(r.U32());
    s.file_labels[inode] = t;
  }
  for (std::uint32_t n = r.U32(); n > 0; --n) {
    std::string path = r.String();
    s.file_paths[path] = r.U64();
  }
  for (std::uint32_t n = r.U32(); n > 0; --n) {
    std::string path = r.String();
    s.pending_trackers[path] = core::TrackerId(r.U32());
  }
  if (r.pos() != body) throw CorruptSnapshot("trailing bytes in snapshot");
  state_ = std::move(s);
  out_origin_.clear();
}

void HostAgent::Boot(std::span<const std::uint8_t> blob, SimTime now) {
  try {
    restore(blob);
  } catch (const CorruptSnapshot& e) {
    state_ = HostState{};
    state_.host_label = default_label_;
    out_origin_.clear();
    Log(now, "alert").Add("reason", "corrupt-snapshot").Add("detail", e.what());
  }
}

void HostAgent::on_reboot(SimTime now, bool crash) {
  std::vector<std::uint8_t> blob = snapshot();
  Log(now, crash ? "crash" : "reboot").Add("snapshot_bytes", std::to_string(blob.size()));
  Boot(blob, now);
}

std::optional<SimPacket> HostAgent::Apply(const HostEvent& ev) {
  using K = HostEvent::Kind;
  switch (ev.kind) {
    case K::kIngress:
      if (!ev.packet) throw ScenarioError("ingress event without packet");
      return on_ingress(*ev.packet, ev.time);
    case K::kEgress:
      if (!ev.packet) throw ScenarioError("egress event without packet");
      return on_egress(*ev.packet, ev.time);
    case K::kAccept:
      on_accept(ev.pid, ev.port, ev.time);
      break;
    case K::kProcessCreate:
      on_process_create(ev.pid, ev.child, ev.time);
      break;
    case K::kProcessExit:
      on_process_exit(ev.pid, ev.time);
      break;
    case K::kFileCreate:
      on_file_create(ev.pid, ev.inode, ev.time, ev.path);
      break;
    case K::kFileRead:
      on_file_read(ev.pid, ev.inode, ev.time);
      break;
    case K::kFileWrite:
      on_file_write(ev.pid, ev.inode, ev.time);
      break;
    case K::kFileDelete:
      on_file_delete(ev.inode, ev.time);
      break;
    case K::kSend:
      on_send(ev.pid, ev.port, ev.time);
      break;
    case K::kLabelAck:
      on_label_ack(ev.flow, ev.time);
      break;
    case K::kReboot:
    case K::kCrash:
      on_reboot(ev.time, ev.kind == K::kCrash);
      break;
  }
  return std::nullopt;
}

}  // namespace difcnet::host
