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

#include "difcnet/dataplane/flow_state.h"

#include <algorithm>

#include "difcnet/core/errors.h"

namespace difcnet::dataplane {

DecisionBuffer::DecisionBuffer(unsigned index_bits) {
  if (index_bits == 0 || index_bits > 32) {
    throw Error("ConfigError", "decision buffer index bits must be in [1, 32]");
  }
  if (index_bits > 26) {
    // 2^32 slots is the hardware figure; a desk simulation cannot allocate it.
    throw Error("ConfigError", "decision buffer larger than 2^26 slots");
  }
  slots_.resize(std::size_t{1} << index_bits);
  mask_ = static_cast<std::uint32_t>(slots_.size() - 1);
}

void DecisionBuffer::Insert(const FlowKey& key, const Decision& d, SimTime now) {
  const std::uint32_t h = FlowHash(key);
  auto& slot = slots_[SlotOf(h)];
  if (slot && slot->hash != h) ++evictions_;
  slot = Slot{h, d, now};
}

std::optional<Decision> DecisionBuffer::Lookup(const FlowKey& key) const {
  const std::uint32_t h = FlowHash(key);
  const auto& slot = slots_[SlotOf(h)];
  if (slot && slot->hash == h) return slot->decision;
  return std::nullopt;
}

std::size_t DecisionBuffer::occupied() const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); }));
}

InstallStatus ConnDecTable::Install(const FlowKey& key, const Decision& d, SimTime now) {
  if (auto it = entries_.find(key); it != entries_.end()) {
    it->second.last_seen = std::max(it->second.last_seen, now);
    return InstallStatus::kDuplicate;
  }
  if (entries_.size() >= capacity_) return InstallStatus::kCapacityExceeded;
  entries_.emplace(key, Entry{d, now});
  return InstallStatus::kInstalled;
}

std::optional<Decision> ConnDecTable::Lookup(const FlowKey& key, SimTime now) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  it->second.last_seen = std::max(it->second.last_seen, now);
  return it->second.decision;
}

std::optional<Decision> ConnDecTable::Peek(const FlowKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.decision;
}

std::size_t ConnDecTable::CollectIdle(SimTime now, SimTime idle_timeout) {
  return std::erase_if(entries_, [&](const auto& kv) {
    return now - kv.second.last_seen > idle_timeout;
  });
}

RateVerdict RateLimiter::Check(Ipv4 src, SimTime now) {
  if (cfg_.max_new_flows == 0) return RateVerdict::kAdmit;
  const SimTime start = now - now % cfg_.window;
  auto& c = counters_[src];
  if (c.window_start != start) c = Counter{start, 0};
  if (c.count >= cfg_.max_new_flows) return RateVerdict::kThrottle;
  ++c.count;
  return RateVerdict::kAdmit;
}

}  // namespace difcnet::dataplane
