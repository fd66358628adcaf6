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

#include "difcnet/sim/network.h"

#include "difcnet/core/errors.h"

namespace difcnet::sim {

using dataplane::Emission;
using dataplane::FlowKey;
using dataplane::Protocol;
using dataplane::SimPacket;
using dataplane::Stage;

namespace {

constexpr std::uint16_t kFirstEphemeralPort = 40000;

bool IsVerdictStage(Stage s) {
  return s == Stage::kConnDec || s == Stage::kBuffer || s == Stage::kPolicy ||
         s == Stage::kThrottled || s == Stage::kMalformed || s == Stage::kRecircExhausted ||
         s == Stage::kNoRoute;
}

}  // namespace

Network::Network(const Topology& topology, const netcl::CompileResult* compiled,
                 NetworkOptions options)
    : topology_(topology),
      compiled_(compiled),
      options_(options),
      control_(options.control_rtt) {
  dataplane::SwitchOptions so;
  so.buffer_index_bits = options_.buffer_index_bits;
  so.conndec_capacity = options_.conndec_capacity;
  so.recirculation_delay =
      options_.recirculation_delay.value_or(options_.control_rtt + Millis(1));
  so.rate_limit = options_.rate_limit;
  for (const auto& id : topology_.switches) {
    auto sw = std::make_unique<dataplane::Switch>(id, so);
    for (const auto& e : topology_.endpoints) {
      if (e.switch_id == id) sw->AttachLocal(e.prefix);
    }
    for (const auto& [prefix, port] : topology_.Routes(id)) sw->AddRoute(prefix, port);
    if (compiled_ && options_.enforce) {
      if (auto it = compiled_->configs.find(id); it != compiled_->configs.end()) {
        sw->LoadConfig(it->second);
      }
    }
    switches_[id] = std::move(sw);
  }
  for (const auto& e : topology_.endpoints) {
    if (e.kind == Topology::EndpointKind::kGateway) continue;
    agents_[e.name] =
        std::make_unique<host::HostAgent>(e.name, e.ip, core::Label{}, options_.host_options);
  }
}

host::HostAgent& Network::agent(const std::string& name) {
  auto it = agents_.find(name);
  if (it == agents_.end()) throw ScenarioError("no host agent on '" + name + "'");
  return *it->second;
}

dataplane::Switch& Network::switch_at(const std::string& id) {
  auto it = switches_.find(id);
  if (it == switches_.end()) throw ScenarioError("no switch '" + id + "'");
  return *it->second;
}

bool Network::IsExternal(const std::string& name) const { return !agents_.contains(name); }

const FlowRecord* Network::flow(const FlowKey& key) const {
  auto it = flows_.find(key);
  return it == flows_.end() ? nullptr : &it->second;
}

void Network::At(SimTime t, std::function<void()> fn) {
  queue_.push({t, seq_++, std::move(fn)});
}

void Network::Schedule(SimTime delay, std::function<void()> fn) { At(now_ + delay, std::move(fn)); }

void Network::DrainAgentLogs() {
  for (auto& [name, a] : agents_) {
    if (a->log().empty()) continue;
    trace_.insert(trace_.end(), a->log().begin(), a->log().end());
    a->clear_log();
  }
}

void Network::Run() {
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ev.fn();
    DrainAgentLogs();
  }
}

void Network::RunUntil(SimTime t) {
  while (!queue_.empty() && queue_.top().time <= t) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ev.fn();
    DrainAgentLogs();
  }
  if (now_ < t) now_ = t;
}

void Network::Start() {
  if (!compiled_ || !options_.enforce) return;
  std::set<Ipv4> hosts;
  for (const auto& e : topology_.endpoints) {
    if (e.kind != Topology::EndpointKind::kGateway) hosts.insert(e.ip);
  }
  for (auto& init : controlplane::emit_label_init(compiled_->configs, hosts)) {
    dataplane::Switch& sw = switch_at(init.switch_id);
    init.packet.id = next_packet_id_++;
    auto port = sw.Route(init.packet.dst_ip);
    if (!port) throw ScenarioError("no route from " + init.switch_id + " to label-init target");
    TraceRecord rec{now_, init.switch_id, "label-init", {}};
    rec.Add("host", init.packet.dst_ip.ToString());
    trace_.push_back(std::move(rec));
    Transmit(init.switch_id, *port, std::move(init.packet));
  }
  Run();
}

void Network::ApplyPlan(const dataplane::UpdatePlan& plan) {
  control_.apply_update(plan, [this](const std::string& id) -> dataplane::Switch* {
    auto it = switches_.find(id);
    return it == switches_.end() ? nullptr : it->second.get();
  });
  TraceRecord rec{now_, "control", "update", {}};
  rec.Add("adds", std::to_string(plan.add_count()))
      .Add("removes", std::to_string(plan.remove_count()));
  trace_.push_back(std::move(rec));
}

SimPacket Network::MakePacket(const FlowKey& key) {
  SimPacket p;
  p.id = next_packet_id_++;
  p.src_ip = key.src_ip;
  p.src_port = key.src_port;
  p.dst_ip = key.dst_ip;
  p.dst_port = key.dst_port;
  p.protocol = key.protocol;
  return p;
}

FlowKey Network::Connect(const ConnectSpec& spec, SimTime delay) {
  const auto& src = topology_.Get(spec.src);
  const auto& dst = topology_.Get(spec.dst);
  FlowKey key;
  key.src_ip = src.ip;
  key.dst_ip = dst.ip;
  key.protocol = spec.protocol;
  if (spec.sport) {
    key.src_port = *spec.sport;
  } else {
    auto [it, fresh] = next_port_.emplace(spec.src, kFirstEphemeralPort);
    key.src_port = it->second++;
  }
  key.dst_port = spec.protocol == Protocol::kIcmp ? 0 : spec.dport;
  if (conns_.contains(key)) throw ScenarioError("connection " + key.ToString() + " reused");
  conns_[key] = {spec, key};
  flows_[key].key = key;

  At(now_ + delay, [this, key]() {
    const Conn& c = conns_.at(key);
    if (!IsExternal(c.spec.src)) agent(c.spec.src).on_send(c.spec.pid, key.src_port, now_);
    switch (key.protocol) {
      case Protocol::kTcp: {
        SimPacket syn = MakePacket(key);
        syn.tcp_flags = dataplane::tcp::kSyn;
        SendFromEndpoint(c.spec.src, std::move(syn));
        break;
      }
      case Protocol::kUdp:
        for (unsigned i = 0; i < c.spec.packets; ++i) {
          At(now_ + options_.packet_gap * i, [this, key, i]() {
            SimPacket d = MakePacket(key);
            d.seq = i;
            d.payload_len = 512;
            ++flows_[key].data_sent;
            SendFromEndpoint(conns_.at(key).spec.src, std::move(d));
          });
        }
        break;
      case Protocol::kIcmp: {
        SimPacket req = MakePacket(key);
        req.icmp_kind = dataplane::IcmpKind::kRequest;
        SendFromEndpoint(c.spec.src, std::move(req));
        break;
      }
    }
  });
  return key;
}

void Network::SendFromEndpoint(const std::string& name, SimPacket pkt) {
  if (options_.enforce) {
    if (!IsExternal(name)) {
      pkt = agent(name).on_egress(std::move(pkt), now_);
    } else {
      // External endpoints carry the empty label on connection-opening packets.
      bool opening = pkt.is_syn() ||
                     (pkt.protocol == Protocol::kUdp && pkt.seq == 0) ||
                     pkt.protocol == Protocol::kIcmp;
      if (opening) pkt.AttachHeader({core::external_label(), {}});
    }
  }
  const auto& e = topology_.Get(name);
  TraceRecord rec{now_, name, "send", {}};
  rec.Add("pkt", std::to_string(pkt.id))
      .Add("flow", pkt.key().ToString())
      .Add("labeled", pkt.labeled() ? "1" : "0");
  trace_.push_back(std::move(rec));
  std::string sw = e.switch_id;
  At(now_ + e.latency, [this, sw, pkt = std::move(pkt)]() mutable {
    ArriveSwitch(sw, std::move(pkt));
  });
}

void Network::Transmit(const std::string& sw, std::uint16_t port, SimPacket pkt) {
  auto peer = topology_.Peer(sw, port);
  if (!peer) throw ScenarioError("switch " + sw + " has nothing on port " + std::to_string(port));
  std::string node = peer->node;
  if (peer->is_switch) {
    At(now_ + peer->latency, [this, node, pkt = std::move(pkt)]() mutable {
      ArriveSwitch(node, std::move(pkt));
    });
  } else {
    At(now_ + peer->latency, [this, node, pkt = std::move(pkt)]() mutable {
      ArriveEndpoint(node, std::move(pkt));
    });
  }
}

void Network::ArriveSwitch(const std::string& id, SimPacket pkt) {
  dataplane::Switch& sw = switch_at(id);
  if (!options_.enforce) {
    auto port = sw.Route(pkt.dst_ip);
    if (port) Transmit(id, *port, std::move(pkt));
    return;
  }
  const FlowKey key = pkt.key();
  dataplane::PipelineResult r = sw.Process(pkt, now_);
  trace_.push_back(r.ToTrace(now_, id, pkt));

  FlowKey client = key;
  bool known = conns_.contains(key);
  if (!known && conns_.contains(key.Reversed())) {
    client = key.Reversed();
    known = true;
  }
  if (known && IsVerdictStage(r.stage) && !pkt.control) {
    FlowRecord& rec = flows_[client];
    rec.packet_verdicts.push_back(r.forwarded());
    if (pkt.labeled() && client == key && !rec.verdict) {
      rec.verdict = r.stage == Stage::kPolicy || r.stage == Stage::kBuffer ||
                            r.stage == Stage::kConnDec
                        ? r.decision
                        : dataplane::Decision::DefaultDeny();
      rec.enforced_at = id;
    }
  }
  if (r.header_out && r.forwarded()) {
    TraceRecord edge{now_, id, "admit", {}};
    edge.Add("from", "flow:" + key.ToString())
        .Add("to", "flow:" + key.ToString() + "@" + id)
        .Add("tracker", std::to_string(r.header_out->tracker.value()));
    trace_.push_back(std::move(edge));
  }

  for (const auto& req : r.requests) {
    SimTime due = control_.Submit(req);
    At(due, [this]() {
      auto done = control_.ServeDue(now_, [this](const std::string& sid) {
        auto it = switches_.find(sid);
        return it == switches_.end() ? nullptr : it->second.get();
      });
      for (const auto& o : done) {
        TraceRecord rec{now_, o.request.switch_id, "conndec-install", {}};
        rec.Add("flow", o.request.flow.ToString())
            .Add("status", o.status == dataplane::InstallStatus::kInstalled   ? "installed"
                           : o.status == dataplane::InstallStatus::kDuplicate ? "duplicate"
                                                                              : "full");
        trace_.push_back(std::move(rec));
      }
    });
  }

  for (auto& em : r.emitted) {
    switch (em.kind) {
      case Emission::Kind::kForward:
        Transmit(id, em.port, std::move(em.packet));
        break;
      case Emission::Kind::kGeneratedAck: {
        em.packet.id = next_packet_id_++;
        auto port = sw.Route(em.packet.dst_ip);
        if (port) Transmit(id, *port, std::move(em.packet));
        break;
      }
      case Emission::Kind::kRecirculate:
        At(now_ + em.delay, [this, id, p = std::move(em.packet)]() mutable {
          ArriveSwitch(id, std::move(p));
        });
        break;
    }
  }
}

void Network::ArriveEndpoint(const std::string& name, SimPacket pkt) {
  if (IsExternal(name)) {
    if (pkt.control) return;
    if (pkt.labeled()) pkt.StripHeader();
    StackReceive(name, pkt);
    return;
  }
  std::string origin;
  if (pkt.labeled()) {
    FlowKey k = pkt.key();
    auto it = flows_.find(k);
    if (it != flows_.end() && !it->second.enforced_at.empty()) {
      origin = "flow:" + k.ToString() + "@" + it->second.enforced_at;
    }
  }
  auto delivered = agent(name).on_ingress(std::move(pkt), now_, origin);
  if (delivered) StackReceive(name, *delivered);
}

void Network::StackReceive(const std::string& name, const SimPacket& pkt) {
  const FlowKey key = pkt.key();
  const bool forward = conns_.contains(key);
  if (!forward && !conns_.contains(key.Reversed())) {
    TraceRecord rec{now_, name, "unsolicited", {}};
    rec.Add("flow", key.ToString());
    trace_.push_back(std::move(rec));
    return;
  }
  const Conn& c = conns_.at(forward ? key : key.Reversed());
  FlowRecord& rec = flows_[c.key];
  TraceRecord deliver{now_, name, "deliver", {}};
  deliver.Add("pkt", std::to_string(pkt.id)).Add("flow", key.ToString());
  trace_.push_back(std::move(deliver));

  if (forward) {
    switch (pkt.protocol) {
      case Protocol::kTcp:
        if (pkt.is_syn()) {
          rec.opened = true;
          if (!IsExternal(name)) agent(name).on_accept(c.spec.server_pid, pkt.dst_port, now_);
          SimPacket synack = MakePacket(key.Reversed());
          synack.tcp_flags = dataplane::tcp::kSyn | dataplane::tcp::kAck;
          SendFromEndpoint(name, std::move(synack));
        } else if (pkt.seq > 0) {
          ++rec.data_delivered;
          deliveries_.emplace_back(c.key, pkt.seq);
        }
        break;
      case Protocol::kUdp:
        rec.opened = true;
        if (!IsExternal(name)) agent(name).on_accept(c.spec.server_pid, pkt.dst_port, now_);
        ++rec.data_delivered;
        deliveries_.emplace_back(c.key, pkt.seq);
        break;
      case Protocol::kIcmp: {
        rec.opened = true;
        SimPacket reply = MakePacket(key.Reversed());
        reply.icmp_kind = dataplane::IcmpKind::kReply;
        SendFromEndpoint(name, std::move(reply));
        break;
      }
    }
    return;
  }

  switch (pkt.protocol) {
    case Protocol::kTcp:
      if ((pkt.tcp_flags & dataplane::tcp::kSyn) && !rec.replied) {
        rec.replied = true;
        SendData(c);
      }
      break;
    case Protocol::kIcmp:
      rec.replied = true;
      if (!IsExternal(name)) agent(name).on_accept(c.spec.pid, pkt.dst_port, now_);
      break;
    case Protocol::kUdp:
      break;
  }
}

void Network::SendData(const Conn& c) {
  const FlowKey key = c.key;
  SimPacket ack = MakePacket(key);
  ack.tcp_flags = dataplane::tcp::kAck;
  SendFromEndpoint(c.spec.src, std::move(ack));
  for (unsigned i = 0; i < c.spec.packets; ++i) {
    At(now_ + options_.packet_gap * (i + 1), [this, key, i]() {
      SimPacket d = MakePacket(key);
      d.tcp_flags = dataplane::tcp::kAck;
      d.seq = i + 1;
      d.payload_len = 1000;
      ++flows_[key].data_sent;
      SendFromEndpoint(conns_.at(key).spec.src, std::move(d));
    });
  }
}

std::string Network::TraceText() const {
  std::string out;
  for (const auto& r : trace_) out += r.ToString() + "\n";
  return out;
}

}  // namespace difcnet::sim
