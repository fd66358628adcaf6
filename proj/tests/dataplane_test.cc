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

#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "difcnet/core/errors.h"
#include "difcnet/dataplane/flow_state.h"
#include "difcnet/dataplane/header.h"
#include "difcnet/dataplane/packet.h"
#include "difcnet/dataplane/switch.h"
#include "difcnet/dataplane/tables.h"
#include "difcnet/netcl/compiler.h"
#include "difcnet/netcl/parser.h"

namespace difcnet::dataplane {
namespace {

using core::Label;
using core::TagId;
using core::TrackerId;

// Bitwise reflected CRC-32, written out independently of the library.
std::uint32_t ReferenceCrc32(const std::uint8_t* data, std::size_t n) {
  std::uint32_t crc = 0xffffffffu;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= data[i];
    for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (0xedb88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

TEST(HeaderTest, BoundaryEncodings) {
  auto empty = EncodeHeader({});
  ASSERT_EQ(empty.size(), kHeaderBaseSize);
  for (auto b : empty) EXPECT_EQ(b, 0);

  std::bitset<core::kTagSpace> all;
  all.set();
  auto full = EncodeHeader({Label::FromBits(all), TrackerId(0xdeadbeef)});
  ASSERT_EQ(full.size(), kHeaderTrackerSize);
  EXPECT_EQ(full[0], kFlagTrackerPresent);
  for (std::size_t i = 1; i < 33; ++i) EXPECT_EQ(full[i], 0xff);
  EXPECT_EQ(full[33], 0xde);
  EXPECT_EQ(full[36], 0xef);

  auto one = EncodeHeader({Label{TagId(9)}, {}});
  EXPECT_EQ(one[2], 0x40);  // tag 9: byte 1 + 1, bit 0x80 >> 1
}

TEST(HeaderTest, DecodeLeavesTrailingBytes) {
  DifcHeader h{Label{TagId(3)}, TrackerId(5)};
  auto wire = EncodeHeader(h);
  wire.push_back(0xaa);
  std::size_t used = 0;
  EXPECT_EQ(DecodeHeader(wire, &used), h);
  EXPECT_EQ(used, kHeaderTrackerSize);
  EXPECT_EQ(EncodedSize(h), kHeaderTrackerSize);
}

TEST(HeaderTest, RejectsMalformedInput) {
  auto wire = EncodeHeader({Label{TagId(1)}, TrackerId(2)});
  EXPECT_THROW(DecodeHeader(std::span(wire).first(36)), MalformedHeader);
  EXPECT_THROW(DecodeHeader(std::span(wire).first(10)), MalformedHeader);
  auto reserved = wire;
  reserved[0] |= 0x02;
  EXPECT_THROW(DecodeHeader(reserved), MalformedHeader);
  auto zero_tracker = wire;
  std::memset(zero_tracker.data() + 33, 0, 4);
  EXPECT_THROW(DecodeHeader(zero_tracker), MalformedHeader);
}

TEST(PacketTest, HeaderAttachSetsEvilBit) {
  SimPacket p;
  EXPECT_FALSE(p.labeled());
  p.AttachHeader({Label{TagId(2)}, {}});
  EXPECT_TRUE(p.labeled());
  EXPECT_EQ(p.header().tags, Label{TagId(2)});
  p.StripHeader();
  EXPECT_FALSE(p.labeled());
  EXPECT_TRUE(p.difc_wire.empty());
  p.evil_bit = true;
  p.difc_wire = {0x04};
  EXPECT_THROW(p.header(), MalformedHeader);
}

TEST(FlowHashTest, MatchesReferenceCrc) {
  const char* check = "123456789";
  EXPECT_EQ(ReferenceCrc32(reinterpret_cast<const std::uint8_t*>(check), 9), 0xcbf43926u);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    FlowKey k{Ipv4(static_cast<std::uint32_t>(rng())), static_cast<std::uint16_t>(rng()),
              Ipv4(static_cast<std::uint32_t>(rng())), static_cast<std::uint16_t>(rng()),
              rng() % 2 ? Protocol::kTcp : Protocol::kUdp};
    auto bytes = k.Serialize();
    EXPECT_EQ(FlowHash(k), ReferenceCrc32(bytes.data(), bytes.size()));
  }
}

TEST(FlowKeyTest, SerializeLayout) {
  FlowKey k{Ipv4::Parse("10.0.0.1"), 0x1234, Ipv4::Parse("10.0.0.2"), 80, Protocol::kTcp};
  auto b = k.Serialize();
  EXPECT_EQ(b[0], 10);
  EXPECT_EQ(b[7], 2);
  EXPECT_EQ(b[8], 0x12);
  EXPECT_EQ(b[9], 0x34);
  EXPECT_EQ(b[11], 80);
  EXPECT_EQ(b[12], 6);
  EXPECT_EQ(k.Reversed().Reversed(), k);
  EXPECT_EQ(k.ToString(), "10.0.0.1:4660>10.0.0.2:80/tcp");
}

TableEntry Entry(std::uint32_t prio, Action a) {
  TableEntry e;
  e.priority = prio;
  e.action = std::move(a);
  return e;
}

TEST(TablesTest, HighestPriorityAcrossTables) {
  PolicyTables t;
  FlowKey key{Ipv4::Parse("10.0.0.1"), 1, Ipv4::Parse("10.0.0.2"), 2, Protocol::kTcp};
  TableEntry contains = Entry(1, Action::Drop());
  contains.label_mask = Label{TagId(5)};
  contains.label_value = Label{TagId(5)};
  t.Add(TableKind::kTernary, contains);
  TableEntry exact = Entry(2, Action::Allow());
  exact.src = AddressMatch::Host(key.src_ip);
  t.Add(TableKind::kExact, exact);

  auto r = match_policies(Label{TagId(5)}, {}, key, t);
  EXPECT_EQ(r.decision.action.kind, ActionKind::kDrop);
  EXPECT_EQ(r.decision.source_priority, 1u);
  EXPECT_EQ(r.tables_hit.size(), 2u);

  r = match_policies(Label{TagId(4)}, {}, key, t);
  EXPECT_EQ(r.decision.action.kind, ActionKind::kAllow);

  FlowKey other = key;
  other.src_ip = Ipv4::Parse("10.0.0.9");
  EXPECT_TRUE(match_policies(Label{}, {}, other, t).decision.is_default());
  EXPECT_TRUE(t.Remove(TableKind::kExact, exact));
  EXPECT_FALSE(t.Remove(TableKind::kExact, exact));
}

TEST(TablesTest, AddressSetsAndNegation) {
  AddressSets sets{{"Floor", {Ipv4Prefix::Parse("10.0.4.0/24")}}};
  EXPECT_TRUE(AddressMatch::Set("Floor").Matches(Ipv4::Parse("10.0.4.9"), sets));
  EXPECT_FALSE(AddressMatch::Set("Floor", true).Matches(Ipv4::Parse("10.0.4.9"), sets));
  EXPECT_TRUE(AddressMatch::Host(Ipv4::Parse("1.1.1.1"), true).Matches(Ipv4::Parse("2.2.2.2"), sets));
  EXPECT_TRUE(AddressMatch::Any().Matches(Ipv4::Parse("2.2.2.2"), sets));
}

TEST(TablesTest, TrackerMatching) {
  TableEntry e = Entry(1, Action::Drop());
  e.tracker = TrackerId(7);
  FlowKey key;
  EXPECT_TRUE(e.Matches({}, TrackerId(7), key, {}));
  EXPECT_FALSE(e.Matches({}, TrackerId(8), key, {}));
  EXPECT_FALSE(e.Matches({}, TrackerId(), key, {}));
  e.tracker_negate = true;
  EXPECT_TRUE(e.Matches({}, TrackerId(8), key, {}));
}

TEST(TablesTest, PrivilegesApplyMasks) {
  PolicyTables t;
  Action declass;
  declass.kind = ActionKind::kDeclassify;
  declass.tags = Label{TagId(1)};
  Action endorse;
  endorse.kind = ActionKind::kEndorse;
  endorse.tags = Label{TagId(9)};
  t.Add(TableKind::kPrivilege, Entry(1, declass));
  t.Add(TableKind::kPrivilege, Entry(2, endorse));
  DifcHeader out = apply_privileges({Label{TagId(1), TagId(2)}, TrackerId(4)}, {}, t);
  EXPECT_EQ(out.tags, (Label{TagId(2), TagId(9)}));
  EXPECT_EQ(out.tracker, TrackerId(4));
}

TEST(DecisionBufferTest, CollisionsEvict) {
  DecisionBuffer buf(2);
  EXPECT_EQ(buf.slot_count(), 4u);
  // Two keys with the same slot but different full hashes.
  FlowKey a{Ipv4(1), 1000, Ipv4(2), 80, Protocol::kTcp};
  FlowKey b = a;
  for (b.src_port = 1001; buf.SlotOf(FlowHash(b)) != buf.SlotOf(FlowHash(a)); ++b.src_port) {
  }
  buf.Insert(a, Decision{Action::Allow(), 3}, 0);
  EXPECT_TRUE(buf.Lookup(a).has_value());
  EXPECT_FALSE(buf.Lookup(b).has_value());
  buf.Insert(b, Decision{Action::Drop(), 4}, 1);
  EXPECT_FALSE(buf.Lookup(a).has_value());
  EXPECT_EQ(buf.Lookup(b)->source_priority, 4u);
  EXPECT_EQ(buf.evictions(), 1u);
  EXPECT_EQ(buf.occupied(), 1u);
}

TEST(ConnDecTest, CapacityAndIdle) {
  ConnDecTable t(2);
  FlowKey a{Ipv4(1), 1, Ipv4(2), 2, Protocol::kTcp};
  FlowKey b = a, c = a;
  b.src_port = 2;
  c.src_port = 3;
  EXPECT_EQ(t.Install(a, {}, 0), InstallStatus::kInstalled);
  EXPECT_EQ(t.Install(a, {}, 0), InstallStatus::kDuplicate);
  EXPECT_EQ(t.Install(b, {}, 0), InstallStatus::kInstalled);
  EXPECT_EQ(t.Install(c, {}, 0), InstallStatus::kCapacityExceeded);
  EXPECT_TRUE(t.Lookup(a, Seconds(5)).has_value());
  EXPECT_EQ(t.CollectIdle(Seconds(8), Seconds(4)), 1u);  // b idle since 0
  EXPECT_TRUE(t.Peek(a).has_value());
  EXPECT_FALSE(t.Peek(b).has_value());
}

TEST(RateLimiterTest, FixedWindowsPerSource) {
  RateLimiter off;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(off.Check(Ipv4(1), 0), RateVerdict::kAdmit);
  RateLimiter lim({Seconds(1), 2});
  EXPECT_EQ(lim.Check(Ipv4(1), 0), RateVerdict::kAdmit);
  EXPECT_EQ(lim.Check(Ipv4(1), Millis(10)), RateVerdict::kAdmit);
  EXPECT_EQ(lim.Check(Ipv4(1), Millis(20)), RateVerdict::kThrottle);
  EXPECT_EQ(lim.Check(Ipv4(2), Millis(20)), RateVerdict::kAdmit);
  EXPECT_EQ(lim.Check(Ipv4(1), Seconds(1)), RateVerdict::kAdmit);
}

class SwitchTest : public ::testing::Test {
 protected:
  void Load(const std::string& policy, SwitchOptions opts = {}) {
    netcl::Bindings b;
    b.hosts = {{"A", a_, "S1"}, {"B", b_, "S1"}, {"C", c_, "S2"}};
    b.ports = {{"S1", {1, 2, 3}}};
    compiled_ = netcl::Compile(netcl::Parse(policy), b);
    sw_ = std::make_unique<Switch>("S1", opts);
    sw_->AttachLocal({a_, 32});
    sw_->AttachLocal({b_, 32});
    sw_->AddRoute({a_, 32}, 1);
    sw_->AddRoute({b_, 32}, 2);
    sw_->AddRoute({Ipv4(0), 0}, 3);
    sw_->LoadConfig(compiled_.configs.at("S1"));
  }

  SimPacket Syn(Ipv4 src, Ipv4 dst, Label l = {}, Protocol proto = Protocol::kTcp) {
    SimPacket p;
    p.src_ip = src;
    p.dst_ip = dst;
    p.src_port = 40000;
    p.dst_port = 22;
    p.protocol = proto;
    p.tcp_flags = proto == Protocol::kTcp ? tcp::kSyn : 0;
    p.AttachHeader({l, {}});
    return p;
  }

  core::Label Tag(const std::string& name) { return Label{compiled_.registry.Get(name)}; }

  Ipv4 a_ = Ipv4::Parse("10.0.0.1");
  Ipv4 b_ = Ipv4::Parse("10.0.0.2");
  Ipv4 c_ = Ipv4::Parse("10.0.1.1");
  netcl::CompileResult compiled_;
  std::unique_ptr<Switch> sw_;
};

TEST_F(SwitchTest, LabeledPacketMatchesPolicy) {
  Load("label_host(ip=A, label={Secret})\n"
       "if match(pkt_label contains Secret && dst_ip==B) then drop\n"
       "if match(dst_ip==any) then allow\n");
  auto r = sw_->Process(Syn(a_, b_, Tag("Secret")), 0);
  EXPECT_EQ(r.stage, Stage::kPolicy);
  EXPECT_FALSE(r.forwarded());
  EXPECT_EQ(r.decision.source_priority, 1u);
  ASSERT_EQ(r.requests.size(), 1u);

  r = sw_->Process(Syn(c_, b_), 0);
  EXPECT_TRUE(r.forwarded());
  ASSERT_EQ(r.emitted.size(), 1u);
  EXPECT_EQ(r.emitted[0].port, 2);
  EXPECT_TRUE(r.emitted[0].packet.enforced);
}

TEST_F(SwitchTest, TransitPacketsAreNotMatched) {
  Load("if match(dst_ip==any) then drop\n");
  auto r = sw_->Process(Syn(a_, c_), 0);
  EXPECT_EQ(r.stage, Stage::kTransit);
  EXPECT_TRUE(r.forwarded());
}

TEST_F(SwitchTest, MalformedHeaderIsDropped) {
  Load("if match(dst_ip==any) then allow\n");
  SimPacket p = Syn(c_, b_);
  p.difc_wire.resize(5);
  auto r = sw_->Process(p, 0);
  EXPECT_EQ(r.stage, Stage::kMalformed);
  EXPECT_FALSE(r.forwarded());
}

TEST_F(SwitchTest, UnlabeledFollowersUseBufferThenConnDec) {
  Load("if match(dst_ip==any) then allow\n");
  SimPacket syn = Syn(c_, b_);
  auto r = sw_->Process(syn, 0);
  ASSERT_TRUE(r.forwarded());
  SimPacket data = syn;
  data.StripHeader();
  data.tcp_flags = tcp::kAck;
  auto d = sw_->Process(data, Micros(50));
  EXPECT_EQ(d.stage, Stage::kBuffer);
  EXPECT_TRUE(d.forwarded());

  // Reply direction, decided here as well.
  SimPacket reply = data;
  reply.src_ip = b_;
  reply.dst_ip = c_;
  std::swap(reply.src_port, reply.dst_port);
  reply.tcp_flags = tcp::kSyn | tcp::kAck;
  auto rr = sw_->Process(reply, Micros(60));
  EXPECT_EQ(rr.stage, Stage::kBuffer);
  EXPECT_TRUE(rr.emitted[0].packet.enforced);

  sw_->InstallConnDec(r.requests[0].flow, r.requests[0].decision, Millis(10));
  EXPECT_EQ(sw_->Process(data, Millis(11)).stage, Stage::kConnDec);
}

TEST_F(SwitchTest, UnknownFlowRecirculatesThenGivesUp) {
  SwitchOptions opts;
  opts.max_recirculations = 2;
  Load("if match(dst_ip==any) then allow\n", opts);
  SimPacket data;
  data.src_ip = c_;
  data.dst_ip = b_;
  data.tcp_flags = tcp::kAck;
  auto r = sw_->Process(data, 0);
  ASSERT_EQ(r.stage, Stage::kRecirculate);
  EXPECT_EQ(r.emitted[0].delay, opts.recirculation_delay);
  r = sw_->Process(r.emitted[0].packet, opts.recirculation_delay);
  ASSERT_EQ(r.stage, Stage::kRecirculate);
  r = sw_->Process(r.emitted[0].packet, 2 * opts.recirculation_delay);
  EXPECT_EQ(r.stage, Stage::kRecircExhausted);
  EXPECT_FALSE(r.forwarded());
}

TEST_F(SwitchTest, UdpLabelsAreAcknowledged) {
  Load("if match(dst_ip==any) then allow\n");
  auto r = sw_->Process(Syn(c_, b_, {}, Protocol::kUdp), 0);
  ASSERT_EQ(r.emitted.size(), 2u);
  bool ack = false;
  for (const auto& e : r.emitted) {
    if (e.kind == Emission::Kind::kGeneratedAck) {
      ack = true;
      ASSERT_TRUE(e.packet.control.has_value());
      EXPECT_EQ(e.packet.control->kind, ControlKind::kLabelAck);
      EXPECT_EQ(e.packet.dst_ip, c_);
    }
  }
  EXPECT_TRUE(ack);
}

TEST_F(SwitchTest, EndorsementRewritesHeader) {
  Load("if match(src_ip==C && dst_ip==B) then endorse({P})\n"
       "if match(pkt_label contains P && dst_ip==B) then allow\n");
  auto r = sw_->Process(Syn(c_, b_), 0);
  EXPECT_TRUE(r.forwarded());
  ASSERT_TRUE(r.header_out.has_value());
  EXPECT_TRUE(r.header_out->tags.contains(compiled_.registry.Get("P")));
  EXPECT_EQ(r.emitted[0].packet.header().tags, r.header_out->tags);
  // Anyone else lacks P and falls to the default deny.
  EXPECT_TRUE(sw_->Process(Syn(a_, b_), 0).decision.is_default());
}

TEST_F(SwitchTest, RerouteAndModify) {
  Load("if match(src_ip==A && dst_ip==B) then reroute(3)\n"
       "if match(src_ip==C && dst_ip==B) then modify(ttl=9)\n");
  auto r = sw_->Process(Syn(a_, b_), 0);
  ASSERT_TRUE(r.forwarded());
  EXPECT_EQ(r.emitted[0].port, 3);
  r = sw_->Process(Syn(c_, b_), 0);
  ASSERT_TRUE(r.forwarded());
  EXPECT_EQ(r.emitted[0].packet.ttl, 9);
}

TEST_F(SwitchTest, RateLimitThrottlesNewFlows) {
  SwitchOptions opts;
  opts.rate_limit = {Seconds(1), 1};
  Load("if match(dst_ip==any) then allow\n", opts);
  EXPECT_TRUE(sw_->Process(Syn(c_, b_), 0).forwarded());
  SimPacket second = Syn(c_, b_);
  second.src_port = 40001;
  auto r = sw_->Process(second, Millis(1));
  EXPECT_EQ(r.stage, Stage::kThrottled);
  EXPECT_FALSE(r.forwarded());
}

TEST_F(SwitchTest, ApplyUpdateIsAllOrNothing) {
  Load("if match(src_ip==A && dst_ip==B) then allow\n");
  const auto before = sw_->tables();
  SwitchUpdate bad;
  bad.adds.push_back({TableKind::kExact, sw_->tables().table(TableKind::kExact)[0]});
  TableEntry missing;
  missing.priority = 77;
  bad.removes.push_back({TableKind::kExact, missing});
  EXPECT_THROW(sw_->ApplyUpdate(bad), UnknownEntry);
  EXPECT_EQ(sw_->tables(), before);
}

}  // namespace
}  // namespace difcnet::dataplane
