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

#include "difcnet/core/ipv4.h"

#include <charconv>

#include "difcnet/core/errors.h"

namespace difcnet {

std::optional<Ipv4> Ipv4::TryParse(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    unsigned part = 0;
    auto [next, ec] = std::from_chars(p, end, part);
    if (ec != std::errc() || next == p || next - p > 3 || part > 255) {
      return std::nullopt;
    }
    value = (value << 8) | part;
    p = next;
  }
  if (p != end) return std::nullopt;
  return Ipv4(value);
}

Ipv4 Ipv4::Parse(std::string_view text) {
  if (auto a = TryParse(text)) return *a;
  throw AddressError("bad IPv4 address `" + std::string(text) + "`");
}

std::string Ipv4::ToString() const {
  return std::to_string(value_ >> 24) + "." + std::to_string((value_ >> 16) & 0xff) +
         "." + std::to_string((value_ >> 8) & 0xff) + "." +
         std::to_string(value_ & 0xff);
}

Ipv4Prefix Ipv4Prefix::Parse(std::string_view text) {
  Ipv4Prefix out;
  std::size_t slash = text.find('/');
  out.network = Ipv4::Parse(text.substr(0, slash));
  if (slash != std::string_view::npos) {
    std::string_view len = text.substr(slash + 1);
    auto [next, ec] = std::from_chars(len.data(), len.data() + len.size(), out.length);
    if (ec != std::errc() || next != len.data() + len.size() || out.length < 0 ||
        out.length > 32) {
      throw AddressError("bad prefix length in `" + std::string(text) + "`");
    }
  }
  return out;
}

bool Ipv4Prefix::Contains(Ipv4 addr) const {
  if (length == 0) return true;
  std::uint32_t mask = length == 32 ? 0xffffffffu : ~((1u << (32 - length)) - 1);
  return (addr.value() & mask) == (network.value() & mask);
}

std::string Ipv4Prefix::ToString() const {
  return network.ToString() + "/" + std::to_string(length);
}

}  // namespace difcnet
