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

#ifndef DIFCNET_CORE_TAG_REGISTRY_H_
#define DIFCNET_CORE_TAG_REGISTRY_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "difcnet/core/label.h"

namespace difcnet::core {

enum class TagKind { kSecrecy, kIntegrity };

std::string_view TagKindName(TagKind kind);

// Maps human tag names onto bit positions. A (name, id, kind) triple never
// changes once assigned; ids are handed out densely from 0.
class TagRegistry {
 public:
  // Returns the existing id when `name` is already registered with the same
  // kind. Throws RegistryError on a kind conflict or when the space is full.
  TagId Register(std::string_view name, TagKind kind);

  std::optional<TagId> Find(std::string_view name) const;
  // Throws RegistryError for unknown names.
  TagId Get(std::string_view name) const;
  const std::string& Name(TagId id) const;
  TagKind Kind(TagId id) const;
  bool Contains(std::string_view name) const { return Find(name).has_value(); }

  std::size_t size() const { return names_.size(); }
  const TagMask& integrity_mask() const { return integrity_; }

  // Pinned registry files: one `<name> secrecy|integrity` per line, `#`
  // comments allowed. Ids are assigned in file order.
  static TagRegistry Parse(std::string_view text);
  std::string Serialize() const;

  friend bool operator==(const TagRegistry&, const TagRegistry&) = default;

 private:
  std::map<std::string, TagId, std::less<>> by_name_;
  std::vector<std::string> names_;
  std::vector<TagKind> kinds_;
  TagMask integrity_;
};

Label secrecy(const Label& l, const TagRegistry& registry);
Label integrity(const Label& l, const TagRegistry& registry);

// No read up / no write down on secrecy, no write up on integrity:
// S_p ⊆ S_q and I_p ⊇ I_q.
bool safe_message(const Label& sender, const Label& receiver,
                  const TagRegistry& registry);

// `{A, B}` literal. Unknown names throw LabelSyntaxError unless
// `auto_register` is set, in which case they are registered as secrecy tags.
Label ParseLabel(std::string_view text, TagRegistry& registry,
                 bool auto_register = false);
Label ParseLabel(std::string_view text, const TagRegistry& registry);
// Tags in ascending id order: `{Sales, Dev, Secret}`.
std::string FormatLabel(const Label& l, const TagRegistry& registry);

}  // namespace difcnet::core

#endif  // DIFCNET_CORE_TAG_REGISTRY_H_
