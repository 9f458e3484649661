#include <cctype>
#include <charconv>
#include <limits>

#include "abe/errors.hpp"
#include "abe/policy/ast.hpp"

namespace abe::policy {

namespace {

constexpr int kMaxDepth = 200;

enum class Tok { End, Word, LParen, RParen, Comma, Cmp };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
  }
  return true;
}

bool equals_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != b[i]) return false;
  }
  return true;
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])) != 0) advance();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= s_.size()) return t;
    char c = s_[pos_];
    if (word_char(c)) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && word_char(s_[pos_])) advance();
      t.kind = Tok::Word;
      t.text = std::string(s_.substr(start, pos_ - start));
      return t;
    }
    advance();
    switch (c) {
      case '(':
        t.kind = Tok::LParen;
        break;
      case ')':
        t.kind = Tok::RParen;
        break;
      case ',':
        t.kind = Tok::Comma;
        break;
      case '=':
        t.kind = Tok::Cmp;
        t.text = "=";
        break;
      case '<':
      case '>':
        t.kind = Tok::Cmp;
        t.text = std::string(1, c);
        if (pos_ < s_.size() && s_[pos_] == '=') {
          advance();
          t.text += '=';
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
    }
    return t;
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  Ast parse() {
    Ast a = or_expr(0);
    if (tok_.kind != Tok::End) fail("unexpected token");
    return a;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::string what = msg;
    if (tok_.kind == Tok::End) {
      what += " (end of input)";
    } else if (!tok_.text.empty()) {
      what += " '" + tok_.text + "'";
    }
    throw ParseError(what, tok_.line, tok_.column);
  }

  void shift() { tok_ = lex_.next(); }

  bool at_keyword(std::string_view kw) const { return tok_.kind == Tok::Word && equals_ci(tok_.text, kw); }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  std::uint64_t integer(const Token& t) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw ParseError("numeric literal out of range '" + t.text + "'", t.line, t.column);
    }
    return v;
  }

  Ast or_expr(int depth) {
    std::vector<Ast> parts;
    parts.push_back(and_expr(depth));
    while (at_keyword("or")) {
      shift();
      parts.push_back(and_expr(depth));
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Ast::gate(1, std::move(parts));
  }

  Ast and_expr(int depth) {
    std::vector<Ast> parts;
    parts.push_back(primary(depth));
    while (at_keyword("and")) {
      shift();
      parts.push_back(primary(depth));
    }
    if (parts.size() == 1) return std::move(parts.front());
    auto n = static_cast<std::uint32_t>(parts.size());
    return Ast::gate(n, std::move(parts));
  }

  Ast primary(int depth) {
    if (depth >= kMaxDepth) fail("policy nested too deeply");
    if (tok_.kind == Tok::LParen) {
      shift();
      Ast inner = or_expr(depth + 1);
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (tok_.kind != Tok::Word) fail("expected attribute, threshold or '('");
    Token head = tok_;
    if (all_digits(head.text)) return threshold(head, depth);
    if (!is_identifier(head.text)) fail("invalid attribute name");
    if (is_keyword(head.text)) fail("keyword used as attribute");
    shift();
    if (tok_.kind != Tok::Cmp) return Ast::atom(head.text);

    Token op = tok_;
    shift();
    if (tok_.kind != Tok::Word) fail("expected value after comparison");
    Token rhs = tok_;
    shift();
    if (all_digits(rhs.text)) return Ast::cmp(head.text, parse_op(op), integer(rhs));
    if (op.text != "=") throw ParseError("comparison needs an unsigned integer", rhs.line, rhs.column);
    return Ast::atom(head.text + "=" + rhs.text);
  }

  Ast threshold(const Token& head, int depth) {
    shift();
    if (!at_keyword("of")) fail("expected 'of' after threshold");
    shift();
    expect(Tok::LParen, "'('");
    std::vector<Ast> kids;
    kids.push_back(or_expr(depth + 1));
    while (tok_.kind == Tok::Comma) {
      shift();
      kids.push_back(or_expr(depth + 1));
    }
    expect(Tok::RParen, "')'");
    std::uint64_t k = 0;
    auto [ptr, ec] = std::from_chars(head.text.data(), head.text.data() + head.text.size(), k);
    if (ec != std::errc() || ptr != head.text.data() + head.text.size() || k < 1 || k > kids.size()) {
      throw ThresholdError("threshold " + head.text + " not in 1.." + std::to_string(kids.size()), head.line,
                           head.column);
    }
    return Ast::gate(static_cast<std::uint32_t>(k), std::move(kids));
  }

  static CmpOp parse_op(const Token& t) {
    if (t.text == "<") return CmpOp::Lt;
    if (t.text == ">") return CmpOp::Gt;
    if (t.text == "<=") return CmpOp::Le;
    if (t.text == ">=") return CmpOp::Ge;
    return CmpOp::Eq;
  }

  Lexer lex_;
  Token tok_;
};

void print_into(std::string& out, const Ast& ast) {
  if (const auto* a = std::get_if<Atom>(&ast.node)) {
    out += a->name;
    return;
  }
  if (const auto* c = std::get_if<NumericCmp>(&ast.node)) {
    out += c->name;
    out += ' ';
    out += to_string(c->op);
    out += ' ';
    out += std::to_string(c->value);
    return;
  }
  const auto& g = std::get<Gate>(ast.node);
  const std::size_t n = g.children.size();
  const char* sep = ", ";
  if (n >= 2 && g.k == 1) {
    sep = " or ";
    out += '(';
  } else if (n >= 2 && g.k == n) {
    sep = " and ";
    out += '(';
  } else {
    out += std::to_string(g.k);
    out += " of (";
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i != 0) out += sep;
    print_into(out, g.children[i]);
  }
  out += ')';
}

}  // namespace

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt:
      return "<";
    case CmpOp::Gt:
      return ">";
    case CmpOp::Le:
      return "<=";
    case CmpOp::Ge:
      return ">=";
    case CmpOp::Eq:
      return "=";
  }
  return "?";
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front())) != 0) return false;
  for (char c : s) {
    if (!word_char(c)) return false;
  }
  return true;
}

bool is_keyword(std::string_view s) { return equals_ci(s, "and") || equals_ci(s, "or") || equals_ci(s, "of"); }

Ast parse_policy(std::string_view text) { return Parser(text).parse(); }

std::string print_policy(const Ast& ast) {
  std::string out;
  print_into(out, ast);
  return out;
}

}  // namespace abe::policy
