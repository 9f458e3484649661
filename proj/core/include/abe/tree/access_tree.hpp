#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "abe/bytes.hpp"
#include "abe/pairing/suite.hpp"
#include "abe/policy/ast.hpp"

namespace abe::tree {

// Threshold tree stored in preorder; node 0 is the root. A child's 1-based
// position in its parent is its interpolation point.
class AccessTree {
 public:
  enum class Kind : std::uint8_t { Leaf = 0, Threshold = 1 };

  struct Node {
    Kind kind = Kind::Leaf;
    std::uint32_t k = 0;
    std::string attr;
    std::vector<std::uint32_t> children;
    bool operator==(const Node&) const = default;
  };

  static AccessTree leaf(std::string attr);
  // Requires 1 <= k <= children.size().
  static AccessTree threshold(std::uint32_t k, std::vector<AccessTree> children);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::uint32_t id) const { return nodes_.at(id); }
  const Node& root() const { return nodes_.front(); }

  // Leaf node ids in preorder.
  std::vector<std::uint32_t> leaves() const;
  std::size_t leaf_count() const;
  std::size_t gate_count() const;
  // Gates with n >= 2 and k = n, resp. k = 1.
  std::size_t and_gate_count() const;
  std::size_t or_gate_count() const;
  std::size_t depth() const;

  // Policy-language rendering of the tree (atoms are the canonical strings).
  std::string to_policy() const;
  // Indented outline, one node per line.
  std::string outline() const;

  // Preorder records: kind u8, k u32, n u32, attr string.
  void write(ByteWriter& w) const;
  static AccessTree read(ByteReader& r);

  bool operator==(const AccessTree&) const = default;

 private:
  AccessTree() = default;
  std::vector<Node> nodes_;
};

constexpr std::uint32_t kWidths[] = {8, 16, 24, 32, 40, 48, 56, 64};

// Smallest multiple of 8 (at least 8) whose range holds v.
std::uint32_t min_width(std::uint64_t v);

// Canonical strings: name#b<i>=<bit>, name#eq=<v>, name#lt=2^<k>, name#ge=2^<k>.
std::string bit_attr(std::string_view name, std::uint32_t bit, bool value);
std::string eq_attr(std::string_view name, std::uint64_t v);
std::string lt_attr(std::string_view name, std::uint32_t k);
std::string ge_attr(std::string_view name, std::uint32_t k);

std::set<std::string> expand_numeric(std::string_view name, std::uint64_t value);

class AttributeBag {
 public:
  struct Numeric {
    std::uint64_t value;
    std::uint32_t width;
    bool operator==(const Numeric&) const = default;
  };

  // Plain attribute: identifier, optionally "ident=word".
  void add(std::string attr);
  void add_numeric(const std::string& name, std::uint64_t value);

  bool contains(std::string_view attr) const { return attrs_.find(std::string(attr)) != attrs_.end(); }
  const std::set<std::string>& attrs() const { return attrs_; }
  const std::map<std::string, Numeric>& numeric() const { return numeric_; }
  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }

  // "A, B, age=30, role=admin": all-digit right-hand sides are numeric.
  static AttributeBag parse(std::string_view list);

  bool operator==(const AttributeBag&) const = default;

 private:
  std::set<std::string> attrs_;
  std::map<std::string, Numeric> numeric_;
};

// Throws UnsatisfiablePolicy if the policy reduces to false.
AccessTree compile(const policy::Ast& ast);
AccessTree compile(std::string_view policy_text);
AccessTree compile_cmp(const std::string& name, policy::CmpOp op, std::uint64_t n);

struct Witness {
  // Used leaf node ids, ascending.
  std::vector<std::uint32_t> leaves;
  // Selected 1-based child positions for each used threshold node.
  std::map<std::uint32_t, std::vector<std::uint32_t>> selected;
  std::size_t size() const { return leaves.size(); }
};

// Fewest leaves; among equal-cost children the lowest positions win.
std::optional<Witness> satisfies(const AccessTree& tree, const std::set<std::string>& attrs);
inline std::optional<Witness> satisfies(const AccessTree& tree, const AttributeBag& bag) {
  return satisfies(tree, bag.attrs());
}

// Delta_{i,S}(0) = prod_{j in S, j != i} (0 - j) / (i - j).
Scalar lagrange_coeff(const PairingSuite& suite, std::uint32_t i, const std::vector<std::uint32_t>& set);

// Share per node id: root gets s, each threshold with share t draws a random
// polynomial q of degree k-1 with q(0) = t and gives child i the value q(i).
std::vector<Scalar> share_secret(const PairingSuite& suite, const AccessTree& tree, const Scalar& s, Rng& rng);

// (leaf id, product of the Lagrange coefficients on its path) for each
// witness leaf; sum of coeff * share(leaf) equals the root secret.
std::vector<std::pair<std::uint32_t, Scalar>> witness_coefficients(const PairingSuite& suite,
                                                                  const AccessTree& tree, const Witness& w);

}  // namespace abe::tree
