#include "abe/scheme/kp_abe.hpp"

#include <algorithm>
#include <mutex>

#include "abe/errors.hpp"

namespace abe::scheme {

namespace {

constexpr std::string_view kUniverseMagic = "ABEU";
constexpr std::uint8_t kUniverseVersion = 1;

ObjectHeader header(const PairingSuite& s, ObjectKind kind) { return {SchemeId::KP, s.level(), kind}; }

}  // namespace

Bytes KpPublicParams::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::PublicParams));
  s.write(w, g1);
  s.write(w, g2);
  s.write(w, y_pub);
  return w.take();
}

KpPublicParams KpPublicParams::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::PublicParams));
  KpPublicParams pp{s.level(), s.read_g1(r), s.read_g2(r), s.read_gt(r)};
  r.expect_done();
  return pp;
}

Bytes KpMasterKey::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::MasterKey));
  s.write(w, y);
  return w.take();
}

KpMasterKey KpMasterKey::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::MasterKey));
  KpMasterKey mk{s.read_scalar(r)};
  r.expect_done();
  return mk;
}

KpUniverse::KpUniverse(SecurityLevel level) : level_(level), mutex_(std::make_unique<std::shared_mutex>()) {}

KpUniverse::KpUniverse(const KpUniverse& o) : level_(o.level_), mutex_(std::make_unique<std::shared_mutex>()) {
  std::shared_lock lock(*o.mutex_);
  secret_ = o.secret_;
  order_ = o.order_;
  entries_ = o.entries_;
}

KpUniverse& KpUniverse::operator=(const KpUniverse& o) {
  if (this == &o) return *this;
  KpUniverse copy(o);
  std::unique_lock lock(*mutex_);
  level_ = copy.level_;
  secret_ = copy.secret_;
  order_ = std::move(copy.order_);
  entries_ = std::move(copy.entries_);
  return *this;
}

std::size_t KpUniverse::size() const {
  std::shared_lock lock(*mutex_);
  return order_.size();
}

bool KpUniverse::contains(const std::string& attr) const {
  std::shared_lock lock(*mutex_);
  return entries_.count(attr) != 0;
}

std::vector<std::string> KpUniverse::attributes() const {
  std::shared_lock lock(*mutex_);
  return order_;
}

KpUniverse::Entry KpUniverse::entry(const std::string& attr) const {
  std::shared_lock lock(*mutex_);
  auto it = entries_.find(attr);
  if (it == entries_.end()) throw UnknownAttribute("attribute '" + attr + "' is not registered");
  return it->second;
}

bool KpUniverse::register_attribute(PairingSuite& s, const std::string& attr, Rng& rng) {
  if (!secret_) throw InvalidArgument("registering attributes needs the authority's universe");
  if (attr.empty()) throw InvalidArgument("empty attribute");
  if (s.level() != level_) throw InvalidArgument("universe level does not match the suite");
  std::unique_lock lock(*mutex_);
  if (entries_.count(attr) != 0) return false;
  Scalar t = s.random_scalar(rng);
  while (t.is_zero()) t = s.random_scalar(rng);
  entries_.emplace(attr, Entry{t, s.exp(s.g1(), t)});
  order_.push_back(attr);
  return true;
}

KpUniverse KpUniverse::public_view() const {
  KpUniverse out(*this);
  out.secret_ = false;
  for (auto& kv : out.entries_) kv.second.t.reset();
  return out;
}

Bytes KpUniverse::to_bytes(const PairingSuite& s) const {
  std::shared_lock lock(*mutex_);
  ByteWriter w;
  w.raw(kUniverseMagic);
  w.u8(kUniverseVersion);
  w.u8(static_cast<std::uint8_t>(level_));
  w.u8(secret_ ? 1 : 0);
  for (const auto& attr : order_) {
    const Entry& e = entries_.at(attr);
    w.str(attr);
    if (secret_) s.write(w, *e.t);
    s.write(w, e.t_pub);
  }
  return w.take();
}

KpUniverse KpUniverse::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  auto magic = r.raw(kUniverseMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kUniverseMagic.begin())) throw FormatError("not an attribute universe");
  if (r.u8() != kUniverseVersion) throw FormatError("unsupported universe version");
  if (level_from_byte(r.u8()) != s.level()) throw FormatError("security level does not match");
  const std::uint8_t flag = r.u8();
  if (flag > 1) throw FormatError("bad universe flag");
  KpUniverse u(s.level());
  u.secret_ = flag == 1;
  while (!r.done()) {
    std::string attr = r.str();
    Entry e;
    if (u.secret_) e.t = s.read_scalar(r);
    e.t_pub = s.read_g1(r);
    if (attr.empty() || !u.entries_.emplace(attr, e).second) throw FormatError("duplicate or empty attribute record");
    u.order_.push_back(std::move(attr));
  }
  return u;
}

Bytes KpKey::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::SecretKey));
  tree.write(w);
  w.u32(static_cast<std::uint32_t>(leaves.size()));
  for (const auto& d : leaves) s.write(w, d);
  return w.take();
}

KpKey KpKey::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::SecretKey));
  tree::AccessTree t = tree::AccessTree::read(r);
  const std::uint32_t n = r.u32();
  if (n != t.leaf_count()) throw FormatError("leaf component count does not match the tree");
  std::vector<G2> leaves;
  leaves.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) leaves.push_back(s.read_g2(r));
  r.expect_done();
  return {std::move(t), std::move(leaves)};
}

Bytes KpCiphertext::to_bytes(const PairingSuite& s) const {
  ByteWriter w;
  write_header(w, header(s, ObjectKind::Ciphertext));
  w.u32(static_cast<std::uint32_t>(attrs.size()));
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    w.str(attrs[i]);
    s.write(w, elements[i]);
  }
  return w.take();
}

KpCiphertext KpCiphertext::from_bytes(const PairingSuite& s, std::span<const std::uint8_t> in) {
  ByteReader r(in);
  read_header(r, header(s, ObjectKind::Ciphertext));
  const std::uint32_t n = r.u32();
  KpCiphertext ct;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string attr = r.str();
    if (attr.empty() || (!ct.attrs.empty() && !(ct.attrs.back() < attr))) {
      throw FormatError("ciphertext attributes must be sorted and unique");
    }
    ct.attrs.push_back(std::move(attr));
    ct.elements.push_back(s.read_g1(r));
  }
  r.expect_done();
  return ct;
}

std::pair<KpPublicParams, KpMasterKey> kp_setup(PairingSuite& s, Rng& rng) {
  Scalar y = s.random_scalar(rng);
  return {KpPublicParams{s.level(), s.g1(), s.g2(), s.exp(s.pair(s.g1(), s.g2()), y)}, KpMasterKey{y}};
}

KpKey kp_keygen(PairingSuite& s, const KpPublicParams& pp, const KpMasterKey& mk, const KpUniverse& universe,
                const tree::AccessTree& tree, Rng& rng) {
  if (!universe.has_secrets()) throw InvalidArgument("key generation needs the authority's universe");
  std::vector<Scalar> t_inv;
  for (auto id : tree.leaves()) t_inv.push_back(universe.entry(tree.node(id).attr).t->inverse());
  auto shares = tree::share_secret(s, tree, mk.y, rng);
  KpKey key{tree, {}};
  std::size_t i = 0;
  for (auto id : tree.leaves()) key.leaves.push_back(s.exp(pp.g2, shares[id] * t_inv[i++]));
  return key;
}

std::pair<KpCiphertext, GT> kp_encrypt(PairingSuite& s, const KpPublicParams& pp, const KpUniverse& universe,
                                       const std::set<std::string>& attrs, Rng& rng) {
  if (attrs.empty()) throw InvalidArgument("a ciphertext needs at least one attribute");
  std::vector<G1> bases;
  for (const auto& a : attrs) bases.push_back(universe.entry(a).t_pub);
  Scalar secret = s.random_scalar(rng);
  KpCiphertext ct;
  ct.attrs.assign(attrs.begin(), attrs.end());
  for (const auto& b : bases) ct.elements.push_back(s.exp(b, secret));
  return {std::move(ct), s.exp(pp.y_pub, secret)};
}

GT kp_decrypt(PairingSuite& s, const KpPublicParams&, const KpKey& key, const KpCiphertext& ct) {
  if (ct.attrs.size() != ct.elements.size()) throw FormatError("ciphertext attribute list is inconsistent");
  std::set<std::string> have(ct.attrs.begin(), ct.attrs.end());
  auto w = tree::satisfies(key.tree, have);
  if (!w) throw PolicyNotSatisfied("ciphertext attributes do not satisfy the key policy");

  const auto leaf_ids = key.tree.leaves();
  GT acc = s.gt_identity();
  for (const auto& [id, coeff] : tree::witness_coefficients(s, key.tree, *w)) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(leaf_ids.begin(), leaf_ids.end(), id) - leaf_ids.begin());
    const auto it = std::lower_bound(ct.attrs.begin(), ct.attrs.end(), key.tree.node(id).attr);
    const G1& e = ct.elements[static_cast<std::size_t>(it - ct.attrs.begin())];
    acc = acc * s.exp(s.pair(e, key.leaves.at(pos)), coeff);
  }
  return acc;
}

}  // namespace abe::scheme
