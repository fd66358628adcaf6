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

#ifndef DIFCNET_DATAPLANE_PACKET_H_
#define DIFCNET_DATAPLANE_PACKET_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/label.h"
#include "difcnet/dataplane/header.h"

namespace difcnet::dataplane {

enum class Protocol : std::uint8_t { kIcmp = 1, kTcp = 6, kUdp = 17 };

std::string ProtocolName(Protocol p);
Protocol ParseProtocol(std::string_view name);

namespace tcp {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kAck = 0x10;
}  // namespace tcp

enum class IcmpKind : std::uint8_t { kNone, kRequest, kReply };

struct FlowKey {
  Ipv4 src_ip;
  std::uint16_t src_port = 0;
  Ipv4 dst_ip;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::kTcp;

  FlowKey Reversed() const {
    return {dst_ip, dst_port, src_ip, src_port, protocol};
  }
  // src_ip . dst_ip . src_port . dst_port . protocol, all big-endian.
  std::array<std::uint8_t, 13> Serialize() const;
  std::string ToString() const;

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

// CRC-32 (reflected polynomial 0xEDB88320) of FlowKey::Serialize().
std::uint32_t FlowHash(const FlowKey& key);

enum class ControlKind : std::uint8_t { kLabelAck, kLabelHost, kLabelFile };

// Switch-generated packets addressed to a host agent rather than an
// application: label acknowledgements and label initialization.
struct ControlPayload {
  ControlKind kind = ControlKind::kLabelAck;
  core::Label label;
  std::string file_path;
  core::TrackerId tracker;

  friend bool operator==(const ControlPayload&, const ControlPayload&) = default;
};

struct SimPacket {
  std::uint64_t id = 0;
  Ipv4 src_ip;
  Ipv4 dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::kTcp;
  std::uint8_t tcp_flags = 0;
  IcmpKind icmp_kind = IcmpKind::kNone;
  // The reserved IP fragment bit; set exactly when difc_wire is non-empty.
  bool evil_bit = false;
  std::uint8_t ttl = 64;
  std::vector<std::uint8_t> ip_options;
  // Encoded DifcHeader bytes.
  std::vector<std::uint8_t> difc_wire;
  std::uint32_t payload_len = 0;
  std::uint32_t seq = 0;
  std::optional<ControlPayload> control;

  // Pipeline metadata carried between switches and across recirculation.
  bool enforced = false;
  std::uint8_t recirculations = 0;

  FlowKey key() const { return {src_ip, src_port, dst_ip, dst_port, protocol}; }
  bool labeled() const { return evil_bit; }
  bool is_syn() const {
    return protocol == Protocol::kTcp && (tcp_flags & tcp::kSyn) && !(tcp_flags & tcp::kAck);
  }

  // Throws MalformedHeader if the evil bit is set but the bytes do not parse.
  DifcHeader header() const;
  void AttachHeader(const DifcHeader& h);
  void StripHeader();
};

}  // namespace difcnet::dataplane

template <>
struct std::hash<difcnet::dataplane::FlowKey> {
  std::size_t operator()(const difcnet::dataplane::FlowKey& k) const noexcept {
    std::uint64_t a = (std::uint64_t{k.src_ip.value()} << 32) | k.dst_ip.value();
    std::uint64_t b = (std::uint64_t{k.src_port} << 24) | (std::uint64_t{k.dst_port} << 8) |
                      static_cast<std::uint8_t>(k.protocol);
    return std::hash<std::uint64_t>{}(a * 0x9E3779B97F4A7C15ull ^ b);
  }
};

#endif  // DIFCNET_DATAPLANE_PACKET_H_
