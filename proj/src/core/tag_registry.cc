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

#include "difcnet/core/tag_registry.h"

#include <cctype>
#include <sstream>

#include "difcnet/core/errors.h"

namespace difcnet::core {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool ValidTagName(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      return false;
  }
  return true;
}

template <typename Resolve>
Label ParseLabelWith(std::string_view text, Resolve resolve) {
  std::string_view s = Trim(text);
  if (s.size() < 2 || s.front() != '{' || s.back() != '}') {
    throw LabelSyntaxError("expected `{...}`, got `" + std::string(text) + "`");
  }
  s = Trim(s.substr(1, s.size() - 2));
  Label out;
  if (s.empty()) return out;
  while (true) {
    std::size_t comma = s.find(',');
    std::string_view name = Trim(s.substr(0, comma));
    if (!ValidTagName(name)) {
      throw LabelSyntaxError("bad tag name `" + std::string(name) + "`");
    }
    out.insert(resolve(name));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

}  // namespace

std::string_view TagKindName(TagKind kind) {
  return kind == TagKind::kSecrecy ? "secrecy" : "integrity";
}

TagId TagRegistry::Register(std::string_view name, TagKind kind) {
  if (auto it = by_name_.find(name); it != by_name_.end()) {
    if (kinds_[it->second.index()] != kind) {
      throw RegistryError("tag `" + std::string(name) + "` already registered as " +
                          std::string(TagKindName(kinds_[it->second.index()])));
    }
    return it->second;
  }
  if (!ValidTagName(name)) {
    throw RegistryError("invalid tag name `" + std::string(name) + "`");
  }
  if (names_.size() >= kTagSpace) {
    throw RegistryError("tag space exhausted (256 tags)");
  }
  TagId id(static_cast<unsigned>(names_.size()));
  names_.emplace_back(name);
  kinds_.push_back(kind);
  by_name_.emplace(std::string(name), id);
  if (kind == TagKind::kIntegrity) integrity_.insert(id);
  return id;
}

std::optional<TagId> TagRegistry::Find(std::string_view name) const {
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  return std::nullopt;
}

TagId TagRegistry::Get(std::string_view name) const {
  if (auto id = Find(name)) return *id;
  throw RegistryError("unknown tag `" + std::string(name) + "`");
}

const std::string& TagRegistry::Name(TagId id) const {
  if (id.index() >= names_.size()) {
    throw RegistryError("unregistered tag id " + std::to_string(id.index()));
  }
  return names_[id.index()];
}

TagKind TagRegistry::Kind(TagId id) const {
  if (id.index() >= kinds_.size()) {
    throw RegistryError("unregistered tag id " + std::to_string(id.index()));
  }
  return kinds_[id.index()];
}

TagRegistry TagRegistry::Parse(std::string_view text) {
  TagRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string name, kind, extra;
    if (!(words >> name)) continue;
    if (!(words >> kind) || (words >> extra)) {
      throw RegistryError("line " + std::to_string(lineno) +
                          ": expected `<name> secrecy|integrity`");
    }
    if (kind == "secrecy") {
      reg.Register(name, TagKind::kSecrecy);
    } else if (kind == "integrity") {
      reg.Register(name, TagKind::kIntegrity);
    } else {
      throw RegistryError("line " + std::to_string(lineno) + ": unknown kind `" +
                          kind + "`");
    }
  }
  return reg;
}

std::string TagRegistry::Serialize() const {
  std::string out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out += names_[i];
    out += ' ';
    out += TagKindName(kinds_[i]);
    out += '\n';
  }
  return out;
}

Label secrecy(const Label& l, const TagRegistry& registry) {
  return l & ~registry.integrity_mask();
}

Label integrity(const Label& l, const TagRegistry& registry) {
  return l & registry.integrity_mask();
}

bool safe_message(const Label& sender, const Label& receiver,
                  const TagRegistry& registry) {
  return secrecy(sender, registry).is_subset_of(secrecy(receiver, registry)) &&
         integrity(receiver, registry).is_subset_of(integrity(sender, registry));
}

Label ParseLabel(std::string_view text, TagRegistry& registry,
                 bool auto_register) {
  return ParseLabelWith(text, [&](std::string_view name) {
    if (auto id = registry.Find(name)) return *id;
    if (!auto_register) {
      throw UnknownTag("unknown tag `" + std::string(name) + "`");
    }
    return registry.Register(name, TagKind::kSecrecy);
  });
}

Label ParseLabel(std::string_view text, const TagRegistry& registry) {
  return ParseLabelWith(text, [&](std::string_view name) {
    if (auto id = registry.Find(name)) return *id;
    throw UnknownTag("unknown tag `" + std::string(name) + "`");
  });
}

std::string FormatLabel(const Label& l, const TagRegistry& registry) {
  std::string out = "{";
  bool first = true;
  for (TagId t : l.tags()) {
    if (!first) out += ", ";
    first = false;
    if (t.index() < registry.size()) {
      out += registry.Name(t);
    } else {
      out += "#" + std::to_string(t.index());
    }
  }
  out += "}";
  return out;
}

}  // namespace difcnet::core
