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

#include "difcnet/netcl/parser.h"

#include <cctype>
#include <optional>
#include <set>

#include "difcnet/core/errors.h"

namespace difcnet::netcl {
namespace {

enum class Tok {
  kWord,
  kPath,
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kComma,
  kAssign,
  kEq,
  kNeq,
  kAnd,
  kAt,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  int column;
};

std::string TokName(Tok t) {
  switch (t) {
    case Tok::kWord:
      return "word";
    case Tok::kPath:
      return "path";
    case Tok::kLParen:
      return "'('";
    case Tok::kRParen:
      return "')'";
    case Tok::kLBrace:
      return "'{'";
    case Tok::kRBrace:
      return "'}'";
    case Tok::kComma:
      return "','";
    case Tok::kAssign:
      return "'='";
    case Tok::kEq:
      return "'=='";
    case Tok::kNeq:
      return "'!='";
    case Tok::kAnd:
      return "'&&'";
    case Tok::kAt:
      return "'@'";
    case Tok::kEnd:
      return "end of line";
  }
  return "?";
}

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

bool IsPathChar(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != ')' && c != ',' &&
         c != '@' && c != '&' && c != '}';
}

bool IsIdentifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!IsWordChar(c)) return false;
  }
  return true;
}

std::vector<Token> Lex(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    auto two = [&](char next) { return i + 1 < line.size() && line[i + 1] == next; };
    if (IsWordChar(c)) {
      std::size_t j = i;
      while (j < line.size() && IsWordChar(line[j])) ++j;
      out.push_back({Tok::kWord, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (c == '/') {
      std::size_t j = i;
      while (j < line.size() && IsPathChar(line[j])) ++j;
      out.push_back({Tok::kPath, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (c == '=' && two('=')) {
      out.push_back({Tok::kEq, "==", col});
      i += 2;
    } else if (c == '!' && two('=')) {
      out.push_back({Tok::kNeq, "!=", col});
      i += 2;
    } else if (c == '&' && two('&')) {
      out.push_back({Tok::kAnd, "&&", col});
      i += 2;
    } else {
      Tok t;
      switch (c) {
        case '(':
          t = Tok::kLParen;
          break;
        case ')':
          t = Tok::kRParen;
          break;
        case '{':
          t = Tok::kLBrace;
          break;
        case '}':
          t = Tok::kRBrace;
          break;
        case ',':
          t = Tok::kComma;
          break;
        case '=':
          t = Tok::kAssign;
          break;
        case '@':
          t = Tok::kAt;
          break;
        default:
          throw SyntaxError(line_no, col, std::string("unexpected character '") + c + "'");
      }
      out.push_back({t, std::string(1, c), col});
      ++i;
    }
  }
  out.push_back({Tok::kEnd, "", static_cast<int>(line.size()) + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line_no) : toks_(std::move(toks)), line_(line_no) {}

  void ParseStatement(Program& program) {
    const Token& head = Expect(Tok::kWord, "statement");
    if (head.text == "label_host" || head.text == "label_file") {
      program.labelings.push_back(ParseDirective(head.text == "label_host"));
    } else if (head.text == "if") {
      program.policies.push_back(ParseRule());
    } else {
      Fail(head, "expected label_host, label_file or if, got '" + head.text + "'");
    }
    Expect(Tok::kEnd, "end of statement");
  }

 private:
  [[noreturn]] void Fail(const Token& t, const std::string& msg) const {
    throw SyntaxError(line_, t.column, msg);
  }

  const Token& Peek() const { return toks_[pos_]; }
  const Token& Next() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::kEnd) ++pos_;
    return t;
  }
  bool Accept(Tok kind) {
    if (Peek().kind != kind) return false;
    Next();
    return true;
  }
  const Token& Expect(Tok kind, const std::string& what) {
    const Token& t = Peek();
    if (t.kind != kind) {
      Fail(t, "expected " + TokName(kind) + " in " + what + ", got " +
                  (t.kind == Tok::kWord || t.kind == Tok::kPath ? "'" + t.text + "'"
                                                                : TokName(t.kind)));
    }
    return Next();
  }
  void ExpectKeyword(std::string_view kw) {
    const Token& t = Expect(Tok::kWord, std::string(kw));
    if (t.text != kw) Fail(t, "expected '" + std::string(kw) + "', got '" + t.text + "'");
  }

  std::string Identifier(const std::string& what) {
    const Token& t = Expect(Tok::kWord, what);
    if (!IsIdentifier(t.text)) Fail(t, "invalid " + what + " '" + t.text + "'");
    return t.text;
  }

  HostRef ParseHost() {
    const Token& t = Expect(Tok::kWord, "host address");
    if (auto ip = Ipv4::TryParse(t.text)) return HostRef::Ip(*ip);
    if (!IsIdentifier(t.text)) Fail(t, "invalid host reference '" + t.text + "'");
    return HostRef::Name(t.text);
  }

  std::vector<std::string> ParseTagSet(bool allow_bare) {
    std::vector<std::string> tags;
    if (allow_bare && Peek().kind == Tok::kWord) {
      tags.push_back(Identifier("tag"));
      return tags;
    }
    Expect(Tok::kLBrace, "tag set");
    if (Accept(Tok::kRBrace)) return tags;
    do {
      tags.push_back(Identifier("tag"));
    } while (Accept(Tok::kComma));
    Expect(Tok::kRBrace, "tag set");
    return tags;
  }

  LabelDirective ParseDirective(bool host) {
    LabelDirective d;
    d.kind = host ? LabelDirective::Kind::kLabelHost : LabelDirective::Kind::kLabelFile;
    Expect(Tok::kLParen, "directive");
    const std::string second = host ? "label" : "file";
    bool named = Peek().kind == Tok::kWord && toks_[pos_ + 1].kind == Tok::kAssign;
    std::set<std::string> seen;
    for (int arg = 0; arg < 2; ++arg) {
      if (arg == 1) Expect(Tok::kComma, "directive arguments");
      std::string key = arg == 0 ? "ip" : second;
      if (named) {
        const Token& k = Expect(Tok::kWord, "argument name");
        if (k.text != "ip" && k.text != second) Fail(k, "unknown argument '" + k.text + "'");
        if (!seen.insert(k.text).second) Fail(k, "duplicate argument '" + k.text + "'");
        key = k.text;
        Expect(Tok::kAssign, "named argument");
      }
      if (key == "ip") {
        d.host = ParseHost();
      } else if (key == "label") {
        d.tags = ParseTagSet(false);
      } else {
        d.file_path = Expect(Tok::kPath, "file path").text;
      }
    }
    Expect(Tok::kRParen, "directive");
    return d;
  }

  Comparison ParseComparison() {
    const Token& f = Expect(Tok::kWord, "predicate");
    Comparison c;
    if (f.text == "src_ip") {
      c.field = Field::kSrcIp;
    } else if (f.text == "dst_ip") {
      c.field = Field::kDstIp;
    } else if (f.text == "pkt_label") {
      c.field = Field::kPktLabel;
    } else if (f.text == "tracker_id") {
      c.field = Field::kTrackerId;
    } else {
      Fail(f, "unknown header field '" + f.text + "'");
    }
    const Token& op = Next();
    if (op.kind == Tok::kEq) {
      c.op = CmpOp::kEq;
    } else if (op.kind == Tok::kNeq) {
      c.op = CmpOp::kNeq;
    } else if (op.kind == Tok::kWord && op.text == "contains") {
      c.op = CmpOp::kContains;
    } else {
      Fail(op, "expected '==', '!=' or 'contains'");
    }
    if ((c.field == Field::kPktLabel) != (c.op == CmpOp::kContains)) {
      Fail(op, "'contains' is the only operator for pkt_label and only applies to it");
    }

    switch (c.field) {
      case Field::kSrcIp:
      case Field::kDstIp:
        if (Peek().kind == Tok::kLBrace) {
          Next();
          c.value.kind = Value::Kind::kHostSet;
          do {
            c.value.hosts.push_back(ParseHost());
          } while (Accept(Tok::kComma));
          Expect(Tok::kRBrace, "address set");
        } else if (Peek().kind == Tok::kWord && Peek().text == "any") {
          Next();
          c.value.kind = Value::Kind::kAny;
        } else {
          c.value.kind = Value::Kind::kHost;
          c.value.host = ParseHost();
        }
        break;
      case Field::kPktLabel:
        c.value.kind = Value::Kind::kTagSet;
        c.value.tags = ParseTagSet(true);
        if (c.value.tags.empty()) Fail(op, "empty tag set in 'contains'");
        break;
      case Field::kTrackerId:
        c.value.kind = Value::Kind::kTracker;
        c.value.path = Expect(Tok::kPath, "tracker reference").text;
        Expect(Tok::kAt, "tracker reference");
        c.value.host = ParseHost();
        break;
    }
    return c;
  }

  RuleAction ParseAction() {
    const Token& t = Expect(Tok::kWord, "action");
    RuleAction a;
    if (t.text == "drop") {
      a.kind = RuleAction::Kind::kDrop;
    } else if (t.text == "allow") {
      a.kind = RuleAction::Kind::kAllow;
    } else if (t.text == "alert") {
      a.kind = RuleAction::Kind::kAlert;
    } else if (t.text == "reroute") {
      a.kind = RuleAction::Kind::kReroute;
      Expect(Tok::kLParen, "reroute");
      const Token& n = Expect(Tok::kWord, "port number");
      unsigned long port = 0;
      try {
        std::size_t used = 0;
        port = std::stoul(n.text, &used);
        if (used != n.text.size() || port > 0xffff) throw std::out_of_range(n.text);
      } catch (const std::exception&) {
        Fail(n, "invalid port '" + n.text + "'");
      }
      a.port = static_cast<std::uint16_t>(port);
      Expect(Tok::kRParen, "reroute");
    } else if (t.text == "modify") {
      a.kind = RuleAction::Kind::kModify;
      Expect(Tok::kLParen, "modify");
      a.field = Identifier("header field");
      Expect(Tok::kAssign, "modify");
      a.value = Expect(Tok::kWord, "modify value").text;
      Expect(Tok::kRParen, "modify");
    } else if (t.text == "declassify" || t.text == "endorse") {
      a.kind = t.text == "declassify" ? RuleAction::Kind::kDeclassify
                                      : RuleAction::Kind::kEndorse;
      Expect(Tok::kLParen, t.text);
      a.tags = ParseTagSet(true);
      Expect(Tok::kRParen, t.text);
    } else {
      Fail(t, "unknown action '" + t.text + "'");
    }
    return a;
  }

  PolicyRule ParseRule() {
    PolicyRule r;
    ExpectKeyword("match");
    Expect(Tok::kLParen, "match");
    std::set<Field> seen;
    do {
      const Token& at = Peek();
      Comparison c = ParseComparison();
      if (!seen.insert(c.field).second) {
        Fail(at, FieldName(c.field) + " appears more than once in one rule");
      }
      r.predicate.push_back(std::move(c));
    } while (Accept(Tok::kAnd));
    Expect(Tok::kRParen, "match");
    ExpectKeyword("then");
    r.action = ParseAction();
    return r;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::string PrintValue(const Comparison& c) {
  const Value& v = c.value;
  switch (v.kind) {
    case Value::Kind::kAny:
      return "any";
    case Value::Kind::kHost:
      return v.host.ToString();
    case Value::Kind::kHostSet: {
      std::vector<std::string> names;
      for (const auto& h : v.hosts) names.push_back(h.ToString());
      return "{" + Join(names) + "}";
    }
    case Value::Kind::kTagSet:
      return v.tags.size() == 1 ? v.tags[0] : "{" + Join(v.tags) + "}";
    case Value::Kind::kTracker:
      return v.path + "@" + v.host.ToString();
  }
  return "";
}

std::string PrintAction(const RuleAction& a) {
  switch (a.kind) {
    case RuleAction::Kind::kDrop:
      return "drop";
    case RuleAction::Kind::kAllow:
      return "allow";
    case RuleAction::Kind::kAlert:
      return "alert";
    case RuleAction::Kind::kReroute:
      return "reroute(" + std::to_string(a.port) + ")";
    case RuleAction::Kind::kModify:
      return "modify(" + a.field + "=" + a.value + ")";
    case RuleAction::Kind::kDeclassify:
      return "declassify({" + Join(a.tags) + "})";
    case RuleAction::Kind::kEndorse:
      return "endorse({" + Join(a.tags) + "})";
  }
  return "";
}

}  // namespace

std::string FieldName(Field f) {
  switch (f) {
    case Field::kSrcIp:
      return "src_ip";
    case Field::kDstIp:
      return "dst_ip";
    case Field::kPktLabel:
      return "pkt_label";
    case Field::kTrackerId:
      return "tracker_id";
  }
  return "?";
}

bool PolicyRule::uses_contains() const { return Find(Field::kPktLabel) != nullptr; }
bool PolicyRule::uses_tracker() const { return Find(Field::kTrackerId) != nullptr; }

const Comparison* PolicyRule::Find(Field f) const {
  for (const auto& c : predicate) {
    if (c.field == f) return &c;
  }
  return nullptr;
}

Program Parse(std::string_view source) {
  Program program;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    // An elision marker stands for omitted rules.
    if (line.substr(first, 3) == "...") continue;

    LineParser(Lex(line, line_no), line_no).ParseStatement(program);
  }
  return program;
}

std::string PrintDirective(const LabelDirective& d) {
  if (d.kind == LabelDirective::Kind::kLabelHost) {
    return "label_host(ip=" + d.host.ToString() + ", label={" + Join(d.tags) + "})";
  }
  return "label_file(ip=" + d.host.ToString() + ", file=" + d.file_path + ")";
}

std::string PrintRule(const PolicyRule& rule) {
  std::string out = "if match(";
  for (std::size_t i = 0; i < rule.predicate.size(); ++i) {
    const Comparison& c = rule.predicate[i];
    if (i > 0) out += " && ";
    out += FieldName(c.field);
    switch (c.op) {
      case CmpOp::kEq:
        out += "==";
        break;
      case CmpOp::kNeq:
        out += "!=";
        break;
      case CmpOp::kContains:
        out += " contains ";
        break;
    }
    out += PrintValue(c);
  }
  return out + ") then " + PrintAction(rule.action);
}

std::string Print(const Program& program) {
  std::string out;
  for (const auto& d : program.labelings) out += PrintDirective(d) + "\n";
  if (!program.labelings.empty() && !program.policies.empty()) out += "\n";
  for (const auto& r : program.policies) out += PrintRule(r) + "\n";
  return out;
}

}  // namespace difcnet::netcl
