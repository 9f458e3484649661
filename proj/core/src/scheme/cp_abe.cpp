#include "abe/scheme/cp_abe.hpp"

#include <algorithm>

#include "abe/errors.hpp"

namespace abe::scheme {

namespace {

ObjectHeader header(const PairingSuite& s, ObjectKind kind) { return {SchemeId::CP, s.level(), kind}; }

G1 hash_attribute(PairingSuite& s, const std::string& attr) { return s.hash_to_group(kCpAttributeTag, attr); }

}  // namespace

Bytes CpPublicParams::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::PublicParams));
  s.write(w, g1);
  s.write(w, g2);
  s.write(w, h);
  s.write(w, f);
  s.write(w, e_alpha);
  return w.take();
}

CpPublicParams CpPublicParams::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::PublicParams));
  CpPublicParams pp{s.level(), s.read_g1(r), s.read_g2(r), s.read_g1(r), s.read_g2(r), s.read_gt(r)};
  r.expect_done();
  return pp;
}

Bytes CpMasterKey::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::MasterKey));
  s.write(w, beta);
  s.write(w, g2_alpha);
  return w.take();
}

CpMasterKey CpMasterKey::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::MasterKey));
  CpMasterKey mk{s.read_scalar(r), s.read_g2(r)};
  r.expect_done();
  return mk;
}

Bytes CpSecretKey::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::SecretKey));
  s.write(w, d);
  w.u32(static_cast<std::uint32_t>(components.size()));
  for (const auto& [attr, c] : components) {
    w.str(attr);
    s.write(w, c.d);
    s.write(w, c.d_prime);
  }
  return w.take();
}

CpSecretKey CpSecretKey::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::SecretKey));
  CpSecretKey key;
  key.d = s.read_g2(r);
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string attr = r.str();
    CpKeyComponent c{s.read_g1(r), s.read_g2(r)};
    if (attr.empty() || !key.components.emplace(std::move(attr), c).second) {
      throw FormatError("duplicate or empty key attribute");
    }
  }
  r.expect_done();
  return key;
}

Bytes CpCiphertext::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::Ciphertext));
  tree.write(w);
  s.write(w, c);
  w.u32(static_cast<std::uint32_t>(leaves.size()));
  for (const auto& l : leaves) {
    s.write(w, l.c);
    s.write(w, l.c_prime);
  }
  return w.take();
}

CpCiphertext CpCiphertext::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::Ciphertext));
  tree::AccessTree t = tree::AccessTree::read(r);
  G1 c = s.read_g1(r);
  const std::uint32_t n = r.u32();
  if (n != t.leaf_count()) throw FormatError("leaf component count does not match the tree");
  std::vector<CpLeafComponent> leaves;
  leaves.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    G2 cy = s.read_g2(r);
    leaves.push_back({cy, s.read_g1(r)});
  }
  r.expect_done();
  return {std::move(t), c, std::move(leaves)};
}

std::pair<CpPublicParams, CpMasterKey> cp_setup(PairingSuite& s, Rng& rng) {
  Scalar alpha = s.random_scalar(rng);
  Scalar beta = s.random_scalar(rng);
  while (beta.is_zero()) beta = s.random_scalar(rng);
  const G1 g1 = s.g1();
  const G2 g2 = s.g2();
  G2 g2_alpha = s.exp(g2, alpha);
  CpPublicParams pp{s.level(), g1, g2, s.exp(g1, beta), s.exp(g2, beta.inverse()), s.pair(g1, g2_alpha)};
  return {pp, CpMasterKey{beta, g2_alpha}};
}

CpSecretKey cp_keygen(PairingSuite& s, const CpPublicParams& pp, const CpMasterKey& mk,
                      const tree::AttributeBag& bag, Rng& rng) {
  return cp_keygen(s, pp, mk, bag.attrs(), rng);
}

CpSecretKey cp_keygen(PairingSuite& s, const CpPublicParams& pp, const CpMasterKey& mk,
                      const std::set<std::string>& attrs, Rng& rng) {
  if (attrs.empty()) throw InvalidArgument("a key needs at least one attribute");
  Scalar r = s.random_scalar(rng);
  CpSecretKey key;
  key.d = s.exp(mk.g2_alpha * s.exp(pp.g2, r), mk.beta.inverse());
  const G1 g1r = s.exp(pp.g1, r);
  for (const auto& attr : attrs) {
    Scalar rj = s.random_scalar(rng);
    key.components.emplace(attr, CpKeyComponent{g1r * s.exp(hash_attribute(s, attr), rj), s.exp(pp.g2, rj)});
  }
  return key;
}

std::pair<CpCiphertext, GT> cp_encrypt(PairingSuite& s, const CpPublicParams& pp, const tree::AccessTree& tree,
                                       Rng& rng) {
  Scalar secret = s.random_scalar(rng);
  auto shares = tree::share_secret(s, tree, secret, rng);
  CpCiphertext ct{tree, s.exp(pp.h, secret), {}};
  GT key = s.exp(pp.e_alpha, secret);
  for (auto id : tree.leaves()) {
    const Scalar& q = shares[id];
    G2 cy = s.exp(pp.g2, q);
    ct.leaves.push_back({cy, s.exp(hash_attribute(s, tree.node(id).attr), q)});
  }
  return {std::move(ct), key};
}

GT cp_decrypt(PairingSuite& s, const CpPublicParams&, const CpSecretKey& key, const CpCiphertext& ct) {
  std::set<std::string> have;
  for (const auto& kv : key.components) have.insert(kv.first);
  auto w = tree::satisfies(ct.tree, have);
  if (!w) throw PolicyNotSatisfied("key attributes do not satisfy the ciphertext policy");

  const auto leaf_ids = ct.tree.leaves();
  GT acc = s.gt_identity();
  for (const auto& [id, coeff] : tree::witness_coefficients(s, ct.tree, *w)) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(leaf_ids.begin(), leaf_ids.end(), id) - leaf_ids.begin());
    const CpLeafComponent& leaf = ct.leaves.at(pos);
    const CpKeyComponent& kc = key.components.at(ct.tree.node(id).attr);
    GT f = s.pair(kc.d, leaf.c) * s.pair(leaf.c_prime, kc.d_prime).inverse();
    acc = acc * s.exp(f, coeff);
  }
  return s.pair(ct.c, key.d) * acc.inverse();
}

}  // namespace abe::scheme
