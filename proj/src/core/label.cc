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

#include "difcnet/core/label.h"

#include "difcnet/core/errors.h"

namespace difcnet::core {

TagId::TagId(unsigned index) : index_(static_cast<std::uint16_t>(index)) {
  if (index >= kTagSpace) {
    throw RegistryError("tag index " + std::to_string(index) +
                        " outside the 256-tag space");
  }
}

Label::Label(std::initializer_list<TagId> tags) {
  for (TagId t : tags) insert(t);
}

Label Label::FromBits(const std::bitset<kTagSpace>& bits) {
  Label l;
  l.bits_ = bits;
  return l;
}

std::vector<TagId> Label::tags() const {
  std::vector<TagId> out;
  out.reserve(bits_.count());
  for (unsigned i = 0; i < kTagSpace; ++i) {
    if (bits_.test(i)) out.emplace_back(i);
  }
  return out;
}

std::array<std::uint8_t, 32> Label::ToBytes() const {
  std::array<std::uint8_t, 32> out{};
  for (unsigned i = 0; i < kTagSpace; ++i) {
    if (bits_.test(i)) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

Label Label::FromBytes(const std::uint8_t* bytes) {
  Label l;
  for (unsigned i = 0; i < kTagSpace; ++i) {
    if (bytes[i / 8] & (0x80u >> (i % 8))) l.bits_.set(i);
  }
  return l;
}

Label merge(const Label& sender, const Label& receiver) {
  return sender | receiver;
}

Label external_label() { return Label{}; }

TrackerId adopt_tracker(TrackerId source, TrackerId destination) {
  return source.present() ? source : destination;
}

Label declassify_label(const Label& l, const TagMask& mask,
                       const CapabilitySet& caps) {
  if (!mask.is_subset_of(caps.minus)) {
    throw CapabilityViolation("declassification of " +
                              std::to_string((mask & ~caps.minus).size()) +
                              " tag(s) without the minus capability");
  }
  return l & ~mask;
}

Label endorse_label(const Label& l, const TagMask& mask,
                    const CapabilitySet& caps) {
  if (!mask.is_subset_of(caps.plus)) {
    throw CapabilityViolation("endorsement of " +
                              std::to_string((mask & ~caps.plus).size()) +
                              " tag(s) without the plus capability");
  }
  return l | mask;
}

bool message_deliverable(const Label& sender, const Label& message,
                         const Label& receiver) {
  return sender.is_subset_of(message) && message.is_subset_of(receiver);
}

}  // namespace difcnet::core
