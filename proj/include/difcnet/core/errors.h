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

#ifndef DIFCNET_CORE_ERRORS_H_
#define DIFCNET_CORE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace difcnet {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and still report the specific kind.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define DIFCNET_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(#Name, what) {}       \
  }

DIFCNET_DEFINE_ERROR(CapabilityViolation);
DIFCNET_DEFINE_ERROR(RegistryError);
DIFCNET_DEFINE_ERROR(LabelSyntaxError);
DIFCNET_DEFINE_ERROR(MalformedHeader);
DIFCNET_DEFINE_ERROR(AddressError);
DIFCNET_DEFINE_ERROR(UnknownTag);
DIFCNET_DEFINE_ERROR(UnknownName);
DIFCNET_DEFINE_ERROR(CompileError);
DIFCNET_DEFINE_ERROR(PlacementError);
DIFCNET_DEFINE_ERROR(UnknownEntry);
DIFCNET_DEFINE_ERROR(CapacityExceeded);
DIFCNET_DEFINE_ERROR(UnknownHost);
DIFCNET_DEFINE_ERROR(PidReuseViolation);
DIFCNET_DEFINE_ERROR(UnknownInode);
DIFCNET_DEFINE_ERROR(CorruptSnapshot);
DIFCNET_DEFINE_ERROR(TopologyError);
DIFCNET_DEFINE_ERROR(ScenarioError);

// Parse failures carry the 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& what)
      : Error("SyntaxError", std::to_string(line) + ":" + std::to_string(column) +
                                 ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

#undef DIFCNET_DEFINE_ERROR

}  // namespace difcnet

#endif  // DIFCNET_CORE_ERRORS_H_
