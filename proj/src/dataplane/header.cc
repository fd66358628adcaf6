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

#include "difcnet/dataplane/header.h"

#include "difcnet/core/errors.h"

namespace difcnet::dataplane {

std::size_t EncodedSize(const DifcHeader& h) {
  return h.tracker.present() ? kHeaderTrackerSize : kHeaderBaseSize;
}

std::vector<std::uint8_t> EncodeHeader(const DifcHeader& h) {
  std::vector<std::uint8_t> out;
  out.reserve(EncodedSize(h));
  out.push_back(h.tracker.present() ? kFlagTrackerPresent : 0);
  auto bitmap = h.tags.ToBytes();
  out.insert(out.end(), bitmap.begin(), bitmap.end());
  if (h.tracker.present()) {
    std::uint32_t v = h.tracker.value();
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

DifcHeader DecodeHeader(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < kHeaderBaseSize) {
    throw MalformedHeader("truncated header: " + std::to_string(bytes.size()) +
                          " bytes");
  }
  const std::uint8_t flags = bytes[0];
  if (flags & ~kFlagTrackerPresent) {
    throw MalformedHeader("reserved flag bits set: " + std::to_string(flags));
  }
  DifcHeader h;
  h.tags = core::Label::FromBytes(bytes.data() + 1);
  std::size_t used = kHeaderBaseSize;
  if (flags & kFlagTrackerPresent) {
    if (bytes.size() < kHeaderTrackerSize) {
      throw MalformedHeader("tracker flag set but tracker id truncated");
    }
    std::uint32_t v = (std::uint32_t{bytes[33]} << 24) | (std::uint32_t{bytes[34]} << 16) |
                      (std::uint32_t{bytes[35]} << 8) | std::uint32_t{bytes[36]};
    if (v == 0) throw MalformedHeader("tracker flag set with tracker id 0");
    h.tracker = core::TrackerId(v);
    used = kHeaderTrackerSize;
  }
  if (consumed) *consumed = used;
  return h;
}

}  // namespace difcnet::dataplane
