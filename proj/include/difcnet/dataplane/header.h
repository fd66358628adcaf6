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

#ifndef DIFCNET_DATAPLANE_HEADER_H_
#define DIFCNET_DATAPLANE_HEADER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "difcnet/core/label.h"

namespace difcnet::dataplane {

// Wire layout, placed between the IP and transport headers:
//
//   byte 0        flags (bit 0: tracker present; all other bits reserved, 0)
//   bytes 1..32   tag bitmap, tag i at byte 1 + i/8, mask 0x80 >> (i % 8)
//   bytes 33..36  tracker id, big-endian (only when flag bit 0 is set)
struct DifcHeader {
  core::Label tags;
  core::TrackerId tracker;

  friend bool operator==(const DifcHeader&, const DifcHeader&) = default;
};

inline constexpr std::uint8_t kFlagTrackerPresent = 0x01;
inline constexpr std::size_t kHeaderBaseSize = 33;
inline constexpr std::size_t kHeaderTrackerSize = 37;

std::vector<std::uint8_t> EncodeHeader(const DifcHeader& h);

// Parses a header from the front of `bytes`; trailing bytes belong to the
// transport layer and are left alone. Throws MalformedHeader on truncation,
// reserved flag bits, or a tracker flag carrying id 0.
DifcHeader DecodeHeader(std::span<const std::uint8_t> bytes,
                        std::size_t* consumed = nullptr);

std::size_t EncodedSize(const DifcHeader& h);

}  // namespace difcnet::dataplane

#endif  // DIFCNET_DATAPLANE_HEADER_H_
