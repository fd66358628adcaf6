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

#ifndef DIFCNET_CORE_IPV4_H_
#define DIFCNET_CORE_IPV4_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace difcnet {

class Ipv4 {
 public:
  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t host_order) : value_(host_order) {}

  // Dotted quad. Throws AddressError on anything else.
  static Ipv4 Parse(std::string_view text);
  static std::optional<Ipv4> TryParse(std::string_view text);

  constexpr std::uint32_t value() const { return value_; }
  std::string ToString() const;

  friend constexpr auto operator<=>(Ipv4, Ipv4) = default;

 private:
  std::uint32_t value_ = 0;
};

// `a.b.c.d/len`; a bare address is a /32.
struct Ipv4Prefix {
  Ipv4 network;
  int length = 32;

  static Ipv4Prefix Parse(std::string_view text);
  bool Contains(Ipv4 addr) const;
  std::string ToString() const;

  friend auto operator<=>(const Ipv4Prefix&, const Ipv4Prefix&) = default;
};

}  // namespace difcnet

template <>
struct std::hash<difcnet::Ipv4> {
  std::size_t operator()(difcnet::Ipv4 a) const noexcept {
    return std::hash<std::uint32_t>{}(a.value());
  }
};

#endif  // DIFCNET_CORE_IPV4_H_
