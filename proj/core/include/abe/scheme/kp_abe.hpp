#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "abe/scheme/common.hpp"
#include "abe/tree/access_tree.hpp"

// Key-policy ABE, small universe: every attribute has a registered secret
// t_i and public T_i = g1^(t_i). Key leaves D_x live in G2, ciphertext
// elements E_i in G1.
namespace abe::scheme {

struct KpPublicParams {
  SecurityLevel level;
  G1 g1;
  G2 g2;
  GT y_pub;  // e(g1, g2)^y

  Bytes to_bytes(const PairingSuite& s) const;
  static KpPublicParams from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

struct KpMasterKey {
  Scalar y;

  Bytes to_bytes(const PairingSuite& s) const;
  static KpMasterKey from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

// Append-only attribute registry. The authority copy holds the secrets;
// public_view() drops them. One writer at a time, any number of readers.
class KpUniverse {
 public:
  struct Entry {
    std::optional<Scalar> t;
    G1 t_pub;
  };

  explicit KpUniverse(SecurityLevel level);
  KpUniverse(const KpUniverse& o);
  KpUniverse& operator=(const KpUniverse& o);

  SecurityLevel level() const { return level_; }
  bool has_secrets() const { return secret_; }
  std::size_t size() const;
  bool contains(const std::string& attr) const;
  // Registration order.
  std::vector<std::string> attributes() const;
  Entry entry(const std::string& attr) const;  // throws UnknownAttribute

  // Idempotent; returns true if the attribute was new. Needs the secret copy.
  bool register_attribute(PairingSuite& s, const std::string& attr, Rng& rng);

  KpUniverse public_view() const;

  // "ABEU" | version | level | secret flag | records (attr, [t], T) to end.
  Bytes to_bytes(const PairingSuite& s) const;
  static KpUniverse from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);

 private:
  SecurityLevel level_;
  bool secret_ = true;
  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
  std::unique_ptr<std::shared_mutex> mutex_;
};

struct KpKey {
  tree::AccessTree tree;
  // One G2 element per leaf, in preorder leaf order.
  std::vector<G2> leaves;

  Bytes to_bytes(const PairingSuite& s) const;
  static KpKey from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

struct KpCiphertext {
  std::vector<std::string> attrs;  // sorted
  std::vector<G1> elements;        // T_i^s, parallel to attrs

  Bytes to_bytes(const PairingSuite& s) const;
  static KpCiphertext from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in);
};

std::pair<KpPublicParams, KpMasterKey> kp_setup(PairingSuite& s, Rng& rng);

// Every leaf attribute must be registered (UnknownAttribute otherwise).
KpKey kp_keygen(PairingSuite& s, const KpPublicParams& pp, const KpMasterKey& mk, const KpUniverse& universe,
                const tree::AccessTree& tree, Rng& rng);

std::pair<KpCiphertext, GT> kp_encrypt(PairingSuite& s, const KpPublicParams& pp, const KpUniverse& universe,
                                       const std::set<std::string>& attrs, Rng& rng);
inline std::pair<KpCiphertext, GT> kp_encrypt(PairingSuite& s, const KpPublicParams& pp, const KpUniverse& universe,
                                              const tree::AttributeBag& bag, Rng& rng) {
  return kp_encrypt(s, pp, universe, bag.attrs(), rng);
}

GT kp_decrypt(PairingSuite& s, const KpPublicParams& pp, const KpKey& key, const KpCiphertext& ct);

}  // namespace abe::scheme
