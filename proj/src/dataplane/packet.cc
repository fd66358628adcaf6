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

#include "difcnet/dataplane/packet.h"

#include <zlib.h>

#include "difcnet/core/errors.h"

namespace difcnet::dataplane {

std::string ProtocolName(Protocol p) {
  switch (p) {
    case Protocol::kIcmp:
      return "icmp";
    case Protocol::kTcp:
      return "tcp";
    case Protocol::kUdp:
      return "udp";
  }
  return "?";
}

Protocol ParseProtocol(std::string_view name) {
  if (name == "tcp") return Protocol::kTcp;
  if (name == "udp") return Protocol::kUdp;
  if (name == "icmp") return Protocol::kIcmp;
  throw Error("ProtocolError", "unknown protocol `" + std::string(name) + "`");
}

std::array<std::uint8_t, 13> FlowKey::Serialize() const {
  std::array<std::uint8_t, 13> out{};
  auto put32 = [&](int at, std::uint32_t v) {
    out[at] = static_cast<std::uint8_t>(v >> 24);
    out[at + 1] = static_cast<std::uint8_t>(v >> 16);
    out[at + 2] = static_cast<std::uint8_t>(v >> 8);
    out[at + 3] = static_cast<std::uint8_t>(v);
  };
  put32(0, src_ip.value());
  put32(4, dst_ip.value());
  out[8] = static_cast<std::uint8_t>(src_port >> 8);
  out[9] = static_cast<std::uint8_t>(src_port);
  out[10] = static_cast<std::uint8_t>(dst_port >> 8);
  out[11] = static_cast<std::uint8_t>(dst_port);
  out[12] = static_cast<std::uint8_t>(protocol);
  return out;
}

std::string FlowKey::ToString() const {
  return src_ip.ToString() + ":" + std::to_string(src_port) + ">" +
         dst_ip.ToString() + ":" + std::to_string(dst_port) + "/" +
         ProtocolName(protocol);
}

std::uint32_t FlowHash(const FlowKey& key) {
  auto bytes = key.Serialize();
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

DifcHeader SimPacket::header() const {
  if (!evil_bit) throw MalformedHeader("packet carries no DIFC header");
  return DecodeHeader(difc_wire);
}

void SimPacket::AttachHeader(const DifcHeader& h) {
  difc_wire = EncodeHeader(h);
  evil_bit = true;
}

void SimPacket::StripHeader() {
  difc_wire.clear();
  evil_bit = false;
}

}  // namespace difcnet::dataplane
