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

#ifndef DIFCNET_NETCL_PARSER_H_
#define DIFCNET_NETCL_PARSER_H_

#include <string>
#include <string_view>

#include "difcnet/netcl/ast.h"

namespace difcnet::netcl {

// Parses NetCL source. Throws SyntaxError with the offending line and column.
// Names are kept unresolved; see Compile for binding and tag checks.
Program Parse(std::string_view source);

// Canonical text; Parse(Print(p)) == p.
std::string Print(const Program& program);
std::string PrintRule(const PolicyRule& rule);
std::string PrintDirective(const LabelDirective& d);

}  // namespace difcnet::netcl

#endif  // DIFCNET_NETCL_PARSER_H_
