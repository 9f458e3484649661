#include "abe/tree/access_tree.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <functional>
#include <limits>
#include <sstream>

#include "abe/errors.hpp"

namespace abe::tree {

using policy::CmpOp;

namespace {

constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
constexpr int kMaxReadDepth = 256;

using MaybeTree = std::optional<AccessTree>;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return std::string(s.substr(b, e - b));
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

bool word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
         });
}

// Threshold over the surviving children; false children never count.
MaybeTree gate(std::uint32_t k, std::vector<MaybeTree> kids) {
  std::vector<AccessTree> alive;
  for (auto& c : kids) {
    if (c) alive.push_back(std::move(*c));
  }
  if (alive.size() < k) return std::nullopt;
  if (alive.size() == 1) return std::move(alive.front());
  return AccessTree::threshold(k, std::move(alive));
}

// Comparison of the low w bits, most significant bit first. Runs of the
// same gate type are merged into one gate.
MaybeTree bit_tree(const std::string& name, std::uint64_t n, std::uint32_t w, bool less) {
  enum class Shape { False, Leaf, Or, And } shape = Shape::False;
  std::vector<AccessTree> items;
  for (std::uint32_t i = 0; i < w; ++i) {
    const bool bit = ((n >> i) & 1U) != 0;
    const bool is_or = less ? bit : !bit;
    AccessTree leaf = AccessTree::leaf(bit_attr(name, i, !less));
    if (shape == Shape::False) {
      if (is_or) {
        items = {std::move(leaf)};
        shape = Shape::Leaf;
      }
      continue;
    }
    const Shape want = is_or ? Shape::Or : Shape::And;
    if (shape == want) {
      items.insert(items.begin(), std::move(leaf));
      continue;
    }
    const auto k = shape == Shape::Or ? 1U : static_cast<std::uint32_t>(items.size());
    AccessTree rest = shape == Shape::Leaf ? std::move(items.front()) : AccessTree::threshold(k, std::move(items));
    items.clear();
    items.push_back(std::move(leaf));
    items.push_back(std::move(rest));
    shape = want;
  }
  switch (shape) {
    case Shape::False:
      return std::nullopt;
    case Shape::Leaf:
      return std::move(items.front());
    case Shape::Or:
      return AccessTree::threshold(1, std::move(items));
    case Shape::And:
      break;
  }
  auto k = static_cast<std::uint32_t>(items.size());
  return AccessTree::threshold(k, std::move(items));
}

MaybeTree less_than(const std::string& name, std::uint64_t n) {
  if (n == 0) return std::nullopt;
  const std::uint32_t w = min_width(n);
  MaybeTree inner = gate(2, {AccessTree::leaf(lt_attr(name, w)), bit_tree(name, n, w, true)});
  if (w == 8) return inner;
  return gate(1, {AccessTree::leaf(lt_attr(name, w - 8)), std::move(inner)});
}

MaybeTree greater_than(const std::string& name, std::uint64_t n) {
  const std::uint32_t w = min_width(n);
  MaybeTree inner = gate(2, {AccessTree::leaf(lt_attr(name, w)), bit_tree(name, n, w, false)});
  MaybeTree above = w < 64 ? MaybeTree(AccessTree::leaf(ge_attr(name, w))) : std::nullopt;
  return gate(1, {std::move(above), std::move(inner)});
}

MaybeTree compare(const std::string& name, CmpOp op, std::uint64_t n) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  switch (op) {
    case CmpOp::Eq:
      return AccessTree::leaf(eq_attr(name, n));
    case CmpOp::Lt:
      return less_than(name, n);
    case CmpOp::Gt:
      return greater_than(name, n);
    case CmpOp::Le:
      if (n == kMax) return AccessTree::leaf(lt_attr(name, 64));
      return less_than(name, n + 1);
    case CmpOp::Ge:
      if (n == 0) return AccessTree::leaf(lt_attr(name, 64));
      return greater_than(name, n - 1);
  }
  return std::nullopt;
}

MaybeTree compile_node(const policy::Ast& ast) {
  if (const auto* a = std::get_if<policy::Atom>(&ast.node)) {
    if (a->name.find('#') != std::string::npos) throw InvalidArgument("attribute names cannot contain '#'");
    return AccessTree::leaf(a->name);
  }
  if (const auto* c = std::get_if<policy::NumericCmp>(&ast.node)) return compare(c->name, c->op, c->value);
  const auto& g = std::get<policy::Gate>(ast.node);
  std::vector<MaybeTree> kids;
  kids.reserve(g.children.size());
  for (const auto& c : g.children) kids.push_back(compile_node(c));
  return gate(g.k, std::move(kids));
}

AccessTree read_node(ByteReader& r, int depth) {
  if (depth > kMaxReadDepth) throw FormatError("access tree too deep");
  const std::uint8_t kind = r.u8();
  const std::uint32_t k = r.u32();
  const std::uint32_t n = r.u32();
  std::string attr = r.str();
  if (kind == static_cast<std::uint8_t>(AccessTree::Kind::Leaf)) {
    if (k != 0 || n != 0 || attr.empty()) throw FormatError("malformed leaf record");
    return AccessTree::leaf(std::move(attr));
  }
  if (kind != static_cast<std::uint8_t>(AccessTree::Kind::Threshold)) throw FormatError("unknown tree node kind");
  // every child record takes at least 13 bytes
  if (n == 0 || k == 0 || k > n || !attr.empty() || n > r.remaining() / 13) {
    throw FormatError("malformed threshold record");
  }
  std::vector<AccessTree> kids;
  kids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) kids.push_back(read_node(r, depth + 1));
  return AccessTree::threshold(k, std::move(kids));
}

}  // namespace

AccessTree AccessTree::leaf(std::string attr) {
  AccessTree t;
  t.nodes_.push_back(Node{Kind::Leaf, 0, std::move(attr), {}});
  return t;
}

AccessTree AccessTree::threshold(std::uint32_t k, std::vector<AccessTree> children) {
  if (children.empty() || k < 1 || k > children.size()) throw InvalidArgument("threshold k out of range");
  AccessTree t;
  t.nodes_.push_back(Node{Kind::Threshold, k, {}, {}});
  for (auto& c : children) {
    const auto offset = static_cast<std::uint32_t>(t.nodes_.size());
    t.nodes_.front().children.push_back(offset);
    for (auto& n : c.nodes_) {
      for (auto& id : n.children) id += offset;
      t.nodes_.push_back(std::move(n));
    }
  }
  return t;
}

std::vector<std::uint32_t> AccessTree::leaves() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == Kind::Leaf) out.push_back(i);
  }
  return out;
}

std::size_t AccessTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == Kind::Leaf; }));
}

std::size_t AccessTree::gate_count() const { return nodes_.size() - leaf_count(); }

std::size_t AccessTree::and_gate_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) {
    return n.kind == Kind::Threshold && n.children.size() >= 2 && n.k == n.children.size();
  }));
}

std::size_t AccessTree::or_gate_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) {
    return n.kind == Kind::Threshold && n.children.size() >= 2 && n.k == 1;
  }));
}

std::size_t AccessTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    for (auto c : nodes_[i].children) d[c] = d[i] + 1;
    best = std::max(best, d[i]);
  }
  return best;
}

std::string AccessTree::to_policy() const {
  std::function<void(std::uint32_t, std::string&)> emit = [&](std::uint32_t id, std::string& out) {
    const Node& n = nodes_[id];
    if (n.kind == Kind::Leaf) {
      out += n.attr;
      return;
    }
    const std::size_t count = n.children.size();
    const char* sep = ", ";
    if (count >= 2 && n.k == 1) {
      sep = " or ";
      out += '(';
    } else if (count >= 2 && n.k == count) {
      sep = " and ";
      out += '(';
    } else {
      out += std::to_string(n.k) + " of (";
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (i != 0) out += sep;
      emit(n.children[i], out);
    }
    out += ')';
  };
  std::string out;
  emit(0, out);
  return out;
}

std::string AccessTree::outline() const {
  std::ostringstream os;
  std::function<void(std::uint32_t, int)> emit = [&](std::uint32_t id, int indent) {
    const Node& n = nodes_[id];
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ');
    if (n.kind == Kind::Leaf) {
      os << n.attr << '\n';
      return;
    }
    const std::size_t count = n.children.size();
    if (count >= 2 && n.k == count) {
      os << "and";
    } else if (count >= 2 && n.k == 1) {
      os << "or";
    } else {
      os << "threshold";
    }
    os << " (" << n.k << " of " << count << ")\n";
    for (auto c : n.children) emit(c, indent + 1);
  };
  emit(0, 0);
  return os.str();
}

void AccessTree::write(ByteWriter& w) const {
  for (const Node& n : nodes_) {
    w.u8(static_cast<std::uint8_t>(n.kind));
    w.u32(n.k);
    w.u32(static_cast<std::uint32_t>(n.children.size()));
    w.str(n.attr);
  }
}

AccessTree AccessTree::read(ByteReader& r) { return read_node(r, 0); }

std::uint32_t min_width(std::uint64_t v) {
  const auto bits = static_cast<std::uint32_t>(std::bit_width(v));
  return bits <= 8 ? 8 : (bits + 7) / 8 * 8;
}

std::string bit_attr(std::string_view name, std::uint32_t bit, bool value) {
  return std::string(name) + "#b" + std::to_string(bit) + (value ? "=1" : "=0");
}

std::string eq_attr(std::string_view name, std::uint64_t v) { return std::string(name) + "#eq=" + std::to_string(v); }

std::string lt_attr(std::string_view name, std::uint32_t k) { return std::string(name) + "#lt=2^" + std::to_string(k); }

std::string ge_attr(std::string_view name, std::uint32_t k) { return std::string(name) + "#ge=2^" + std::to_string(k); }

std::set<std::string> expand_numeric(std::string_view name, std::uint64_t value) {
  std::set<std::string> out;
  const std::uint32_t w = min_width(value);
  for (std::uint32_t i = 0; i < w; ++i) out.insert(bit_attr(name, i, ((value >> i) & 1U) != 0));
  out.insert(eq_attr(name, value));
  for (std::uint32_t k : kWidths) {
    if (k == 64 || value < (std::uint64_t{1} << k)) {
      out.insert(lt_attr(name, k));
    } else {
      out.insert(ge_attr(name, k));
    }
  }
  return out;
}

void AttributeBag::add(std::string attr) {
  const auto eq = attr.find('=');
  const std::string_view head = std::string_view(attr).substr(0, eq);
  bool ok = policy::is_identifier(head) && !policy::is_keyword(head);
  if (ok && eq != std::string::npos) {
    std::string_view rhs = std::string_view(attr).substr(eq + 1);
    ok = word(rhs) && !all_digits(rhs);
  }
  if (!ok) throw InvalidArgument("invalid attribute '" + attr + "'");
  attrs_.insert(std::move(attr));
}

void AttributeBag::add_numeric(const std::string& name, std::uint64_t value) {
  if (!policy::is_identifier(name) || policy::is_keyword(name)) {
    throw InvalidArgument("invalid numeric attribute name '" + name + "'");
  }
  if (!numeric_.emplace(name, Numeric{value, min_width(value)}).second) {
    throw InvalidArgument("numeric attribute '" + name + "' assigned twice");
  }
  auto e = expand_numeric(name, value);
  attrs_.insert(e.begin(), e.end());
}

AttributeBag AttributeBag::parse(std::string_view list) {
  AttributeBag bag;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = list.find(',', pos);
    std::string item = trim(list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (item.empty()) throw InvalidArgument("empty attribute in list");
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      bag.add(item);
    } else {
      std::string name = trim(std::string_view(item).substr(0, eq));
      std::string rhs = trim(std::string_view(item).substr(eq + 1));
      if (all_digits(rhs)) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), v);
        if (ec != std::errc() || p != rhs.data() + rhs.size()) throw InvalidArgument("numeric value out of range: " + rhs);
        bag.add_numeric(name, v);
      } else {
        bag.add(name + "=" + rhs);
      }
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return bag;
}

AccessTree compile(const policy::Ast& ast) {
  MaybeTree t = compile_node(ast);
  if (!t) throw UnsatisfiablePolicy("policy can never be satisfied");
  return std::move(*t);
}

AccessTree compile(std::string_view policy_text) { return compile(policy::parse_policy(policy_text)); }

AccessTree compile_cmp(const std::string& name, CmpOp op, std::uint64_t n) {
  if (!policy::is_identifier(name)) throw InvalidArgument("invalid numeric attribute name '" + name + "'");
  MaybeTree t = compare(name, op, n);
  if (!t) throw UnsatisfiablePolicy(name + " " + std::string(policy::to_string(op)) + " " + std::to_string(n) +
                                    " can never hold");
  return std::move(*t);
}

std::optional<Witness> satisfies(const AccessTree& tree, const std::set<std::string>& attrs) {
  const auto& nodes = tree.nodes();
  std::vector<std::size_t> cost(nodes.size(), kInf);
  std::vector<std::vector<std::uint32_t>> pick(nodes.size());
  for (std::size_t id = nodes.size(); id-- > 0;) {
    const auto& n = nodes[id];
    if (n.kind == AccessTree::Kind::Leaf) {
      cost[id] = attrs.count(n.attr) != 0 ? 1 : kInf;
      continue;
    }
    std::vector<std::pair<std::size_t, std::uint32_t>> ok;
    for (std::uint32_t i = 0; i < n.children.size(); ++i) {
      const std::size_t c = cost[n.children[i]];
      if (c != kInf) ok.emplace_back(c, i + 1);
    }
    if (ok.size() < n.k) continue;
    std::stable_sort(ok.begin(), ok.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t total = 0;
    for (std::uint32_t i = 0; i < n.k; ++i) {
      total += ok[i].first;
      pick[id].push_back(ok[i].second);
    }
    std::sort(pick[id].begin(), pick[id].end());
    cost[id] = total;
  }
  if (cost[0] == kInf) return std::nullopt;

  Witness w;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const std::uint32_t id = stack.back();
    stack.pop_back();
    const auto& n = nodes[id];
    if (n.kind == AccessTree::Kind::Leaf) {
      w.leaves.push_back(id);
      continue;
    }
    w.selected[id] = pick[id];
    for (auto pos : pick[id]) stack.push_back(n.children[pos - 1]);
  }
  std::sort(w.leaves.begin(), w.leaves.end());
  return w;
}

Scalar lagrange_coeff(const PairingSuite& suite, std::uint32_t i, const std::vector<std::uint32_t>& set) {
  if (std::find(set.begin(), set.end(), i) == set.end()) throw InvalidArgument("index not in interpolation set");
  std::vector<std::uint32_t> sorted = set;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() == 0) {
    throw InvalidArgument("interpolation points must be distinct and nonzero");
  }
  Scalar num = suite.scalar(1);
  Scalar den = suite.scalar(1);
  const Scalar xi = suite.scalar(i);
  for (std::uint32_t j : set) {
    if (j == i) continue;
    const Scalar xj = suite.scalar(j);
    num = num * -xj;
    den = den * (xi - xj);
  }
  return num * den.inverse();
}

std::vector<Scalar> share_secret(const PairingSuite& suite, const AccessTree& tree, const Scalar& s, Rng& rng) {
  const auto& nodes = tree.nodes();
  std::vector<Scalar> shares(nodes.size());
  shares[0] = s;
  std::vector<Scalar> coeffs;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto& n = nodes[id];
    if (n.kind == AccessTree::Kind::Leaf) continue;
    coeffs.assign(1, shares[id]);
    for (std::uint32_t d = 1; d < n.k; ++d) coeffs.push_back(suite.random_scalar(rng));
    for (std::uint32_t i = 0; i < n.children.size(); ++i) {
      const Scalar x = suite.scalar(i + 1);
      Scalar y = coeffs.back();
      for (std::size_t d = coeffs.size() - 1; d-- > 0;) y = y * x + coeffs[d];
      shares[n.children[i]] = y;
    }
  }
  return shares;
}

std::vector<std::pair<std::uint32_t, Scalar>> witness_coefficients(const PairingSuite& suite, const AccessTree& tree,
                                                                  const Witness& w) {
  std::vector<std::pair<std::uint32_t, Scalar>> out;
  std::vector<std::pair<std::uint32_t, Scalar>> stack{{0, suite.scalar(1)}};
  while (!stack.empty()) {
    auto [id, c] = stack.back();
    stack.pop_back();
    const auto& n = tree.node(id);
    if (n.kind == AccessTree::Kind::Leaf) {
      out.emplace_back(id, c);
      continue;
    }
    const auto& sel = w.selected.at(id);
    for (auto pos : sel) stack.emplace_back(n.children[pos - 1], c * lagrange_coeff(suite, pos, sel));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace abe::tree
