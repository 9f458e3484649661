#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "abe/scheme/common.hpp"
#include "abe/tree/access_tree.hpp"

// Ciphertext-policy ABE as a key encapsulation. Attribute hashes and the
// ciphertext element C live in G1; the key element D and leaf elements C_y
// live in G2.
namespace abe::scheme {

inline constexpr std::string_view kCpAttributeTag = "abe/cp/attribute";

struct CpPublicParams {
  SecurityLevel level;
  G1 g1;
  G2 g2;
  G1 h;         // g1^beta
  G2 f;         // g2^(1/beta)
  GT e_alpha;   // e(g1, g2)^alpha

  Bytes to_bytes(const PairingSuite& s) const;
  static CpPublicParams from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

struct CpMasterKey {
  Scalar beta;
  G2 g2_alpha;

  Bytes to_bytes(const PairingSuite& s) const;
  static CpMasterKey from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

struct CpKeyComponent {
  G1 d;        // g1^r * H(j)^(r_j)
  G2 d_prime;  // g2^(r_j)
};

struct CpSecretKey {
  G2 d;  // (g2^alpha * g2^r)^(1/beta)
  std::map<std::string, CpKeyComponent> components;

  Bytes to_bytes(const PairingSuite& s) const;
  static CpSecretKey from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

struct CpLeafComponent {
  G2 c;        // g2^(q_y(0))
  G1 c_prime;  // H(att(y))^(q_y(0))
};

struct CpCiphertext {
  tree::AccessTree tree;
  G1 c;  // h^s
  // One entry per leaf, in preorder leaf order.
  std::vector<CpLeafComponent> leaves;

  Bytes to_bytes(const PairingSuite& s) const;
  static CpCiphertext from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

std::pair<CpPublicParams, CpMasterKey> cp_setup(PairingSuite& s, Rng& rng);

// Throws InvalidArgument on an empty bag.
CpSecretKey cp_keygen(PairingSuite& s, const CpPublicParams& pp, const CpMasterKey& mk,
                      const tree::AttributeBag& bag, Rng& rng);
CpSecretKey cp_keygen(PairingSuite& s, const CpPublicParams& pp, const CpMasterKey& mk,
                      const std::set<std::string>& attrs, Rng& rng);

// Returns the ciphertext and the encapsulated key e(g1, g2)^(alpha s).
std::pair<CpCiphertext, GT> cp_encrypt(PairingSuite& s, const CpPublicParams& pp, const tree::AccessTree& tree,
                                       Rng& rng);

// Throws PolicyNotSatisfied when the key's attributes do not satisfy the tree.
GT cp_decrypt(PairingSuite& s, const CpPublicParams& pp, const CpSecretKey& key, const CpCiphertext& ct);

}  // namespace abe::scheme
