#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace abe::policy {

enum class CmpOp : std::uint8_t { Lt, Gt, Le, Ge, Eq };

std::string_view to_string(CmpOp op);

struct Atom {
  // Either a plain identifier or "ident=token", kept whole.
  std::string name;
  bool operator==(const Atom&) const = default;
};

struct NumericCmp {
  std::string name;
  CmpOp op = CmpOp::Eq;
  std::uint64_t value = 0;
  bool operator==(const NumericCmp&) const = default;
};

struct Ast;

// k-of-n threshold; and = n of n, or = 1 of n.
struct Gate {
  std::uint32_t k = 1;
  std::vector<Ast> children;
  bool operator==(const Gate& o) const;
};

struct Ast {
  std::variant<Atom, NumericCmp, Gate> node;

  static Ast atom(std::string name) { return Ast{Atom{std::move(name)}}; }
  static Ast cmp(std::string name, CmpOp op, std::uint64_t value) {
    return Ast{NumericCmp{std::move(name), op, value}};
  }
  static Ast gate(std::uint32_t k, std::vector<Ast> children) { return Ast{Gate{k, std::move(children)}}; }

  bool operator==(const Ast& o) const { return node == o.node; }
};

inline bool Gate::operator==(const Gate& o) const { return k == o.k && children == o.children; }

// Parses the policy language:
//   policy  := or_expr
//   or_expr := and_expr { "or" and_expr }
//   and_expr:= primary { "and" primary }
//   primary := INT "of" "(" policy { "," policy } ")" | IDENT CMP INT | IDENT | "(" policy ")"
// Keywords are case-insensitive. "name = word" with a non-numeric word is a
// single atom. Chains of one operator without parentheses become one gate.
// Throws ParseError or ThresholdError.
Ast parse_policy(std::string_view text);

// Canonical text; parse_policy(print_policy(a)) == a.
std::string print_policy(const Ast& ast);

bool is_identifier(std::string_view s);
bool is_keyword(std::string_view s);

}  // namespace abe::policy
