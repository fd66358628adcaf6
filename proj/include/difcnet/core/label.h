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

#ifndef DIFCNET_CORE_LABEL_H_
#define DIFCNET_CORE_LABEL_H_

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace difcnet::core {

inline constexpr std::size_t kTagSpace = 256;

// Index of one DIFC tag; always < kTagSpace.
class TagId {
 public:
  constexpr TagId() = default;
  explicit TagId(unsigned index);

  constexpr unsigned index() const { return index_; }

  friend constexpr auto operator<=>(TagId, TagId) = default;

 private:
  std::uint16_t index_ = 0;
};

// A set of tags. Also used as the 256-bit mask type for privileges and
// ternary patterns, which share the same bit layout.
class Label {
 public:
  Label() = default;
  Label(std::initializer_list<TagId> tags);

  static Label FromBits(const std::bitset<kTagSpace>& bits);

  bool contains(TagId t) const { return bits_.test(t.index()); }
  void insert(TagId t) { bits_.set(t.index()); }
  void erase(TagId t) { bits_.reset(t.index()); }

  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }
  bool is_subset_of(const Label& other) const {
    return (bits_ & ~other.bits_).none();
  }

  // Tags in ascending id order.
  std::vector<TagId> tags() const;

  const std::bitset<kTagSpace>& bits() const { return bits_; }

  // Big-endian bit order: tag 0 is the MSB of byte 0.
  std::array<std::uint8_t, 32> ToBytes() const;
  static Label FromBytes(const std::uint8_t* bytes);

  Label operator|(const Label& o) const { return FromBits(bits_ | o.bits_); }
  Label operator&(const Label& o) const { return FromBits(bits_ & o.bits_); }
  Label operator~() const { return FromBits(~bits_); }
  Label& operator|=(const Label& o) {
    bits_ |= o.bits_;
    return *this;
  }
  Label& operator&=(const Label& o) {
    bits_ &= o.bits_;
    return *this;
  }

  friend bool operator==(const Label&, const Label&) = default;
  // Arbitrary but total order so labels can key ordered containers.
  friend bool operator<(const Label& a, const Label& b) {
    return a.ToBytes() < b.ToBytes();
  }

 private:
  std::bitset<kTagSpace> bits_;
};

using TagMask = Label;

// Tags a holder may add (plus) and remove (minus).
struct CapabilitySet {
  TagMask plus;
  TagMask minus;

  friend bool operator==(const CapabilitySet&, const CapabilitySet&) = default;
};

// Per-file taint identifier. Zero means "no tracker".
class TrackerId {
 public:
  constexpr TrackerId() = default;
  constexpr explicit TrackerId(std::uint32_t v) : value_(v) {}

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool present() const { return value_ != 0; }

  friend constexpr auto operator<=>(TrackerId, TrackerId) = default;

 private:
  std::uint32_t value_ = 0;
};

// Implicit label change on receive: the receiver absorbs every sender tag.
Label merge(const Label& sender, const Label& receiver);

// The untrusted outside world carries no tags.
Label external_label();

// Union rule for the tracker slot: a present tracker from the source replaces
// the destination's, otherwise the destination keeps its own.
TrackerId adopt_tracker(TrackerId source, TrackerId destination);

// Removes `mask` from `l`. Throws CapabilityViolation unless every tag in
// `mask` is in caps.minus.
Label declassify_label(const Label& l, const TagMask& mask,
                       const CapabilitySet& caps);

// Adds `mask` to `l`. Throws CapabilityViolation unless mask ⊆ caps.plus.
Label endorse_label(const Label& l, const TagMask& mask,
                    const CapabilitySet& caps);

// L_sender ⊆ L_message ⊆ L_receiver.
bool message_deliverable(const Label& sender, const Label& message,
                         const Label& receiver);

}  // namespace difcnet::core

template <>
struct std::hash<difcnet::core::Label> {
  std::size_t operator()(const difcnet::core::Label& l) const noexcept {
    return std::hash<std::bitset<difcnet::core::kTagSpace>>{}(l.bits());
  }
};

#endif  // DIFCNET_CORE_LABEL_H_
