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

#ifndef DIFCNET_DATAPLANE_FLOW_STATE_H_
#define DIFCNET_DATAPLANE_FLOW_STATE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "difcnet/core/ipv4.h"
#include "difcnet/core/time.h"
#include "difcnet/dataplane/packet.h"
#include "difcnet/dataplane/tables.h"

namespace difcnet::dataplane {

// Direct-mapped cache of fresh decisions, indexed by the low bits of the
// flow's CRC-32. It bridges the window between a decision and the ConnDec
// install landing. A slot holds one 32-bit hash; inserting into an occupied
// slot evicts the occupant.
class DecisionBuffer {
 public:
  explicit DecisionBuffer(unsigned index_bits = 16);

  void Insert(const FlowKey& key, const Decision& d, SimTime now);
  std::optional<Decision> Lookup(const FlowKey& key) const;

  std::size_t slot_count() const { return slots_.size(); }
  std::size_t SlotOf(std::uint32_t hash) const { return hash & mask_; }
  std::size_t occupied() const;
  std::uint64_t evictions() const { return evictions_; }

 private:
  struct Slot {
    std::uint32_t hash;
    Decision decision;
    SimTime installed_at;
  };
  std::vector<std::optional<Slot>> slots_;
  std::uint32_t mask_;
  std::uint64_t evictions_ = 0;
};

enum class InstallStatus { kInstalled, kDuplicate, kCapacityExceeded };

// Exact-match per-flow verdict table.
class ConnDecTable {
 public:
  static constexpr std::size_t kDefaultCapacity = 220'000;

  explicit ConnDecTable(std::size_t capacity = kDefaultCapacity)
      : capacity_(capacity) {}

  InstallStatus Install(const FlowKey& key, const Decision& d, SimTime now);
  // Refreshes last_seen on a hit.
  std::optional<Decision> Lookup(const FlowKey& key, SimTime now);
  std::optional<Decision> Peek(const FlowKey& key) const;
  bool Erase(const FlowKey& key) { return entries_.erase(key) > 0; }

  // Removes entries idle for longer than `idle_timeout`.
  std::size_t CollectIdle(SimTime now, SimTime idle_timeout);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  struct Entry {
    Decision decision;
    SimTime last_seen;
  };
  std::unordered_map<FlowKey, Entry> entries_;
  std::size_t capacity_;
};

enum class RateVerdict { kAdmit, kThrottle };

struct RateLimitConfig {
  SimTime window = Seconds(1);
  // 0 disables limiting.
  std::uint32_t max_new_flows = 0;
};

// Fixed, epoch-aligned windows counted per source address.
class RateLimiter {
 public:
  explicit RateLimiter(RateLimitConfig cfg = {}) : cfg_(cfg) {}

  RateVerdict Check(Ipv4 src, SimTime now);
  const RateLimitConfig& config() const { return cfg_; }

 private:
  struct Counter {
    SimTime window_start;
    std::uint32_t count;
  };
  RateLimitConfig cfg_;
  std::unordered_map<Ipv4, Counter> counters_;
};

}  // namespace difcnet::dataplane

#endif  // DIFCNET_DATAPLANE_FLOW_STATE_H_
