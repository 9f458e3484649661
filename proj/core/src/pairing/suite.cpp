#include "abe/pairing/suite.hpp"

#include <array>

#include "abe/digest.hpp"
#include "abe/errors.hpp"

namespace abe {

using math::BnCurve;
using math::CurveId;
using math::Limbs;

int level_bits(SecurityLevel level) {
  switch (level) {
    case SecurityLevel::S80:
      return 80;
    case SecurityLevel::S112:
      return 112;
    case SecurityLevel::S128:
      return 128;
  }
  return 0;
}

SecurityLevel level_from_bits(int bits) {
  switch (bits) {
    case 80:
      return SecurityLevel::S80;
    case 112:
      return SecurityLevel::S112;
    case 128:
      return SecurityLevel::S128;
    default:
      throw InvalidArgument("security level must be 80, 112 or 128, got " + std::to_string(bits));
  }
}

SecurityLevel level_from_byte(std::uint8_t b) {
  if (b > 2) throw FormatError("unknown security level byte");
  return static_cast<SecurityLevel>(b);
}

namespace {

CurveId curve_for(SecurityLevel level) {
  switch (level) {
    case SecurityLevel::S80:
      return CurveId::BN160;
    case SecurityLevel::S112:
      return CurveId::BN224;
    case SecurityLevel::S128:
      return CurveId::BN256;
  }
  throw InvalidArgument("bad security level");
}

void write_tagged(ByteWriter& w, GroupTag tag, const Bytes& body) {
  w.u8(static_cast<std::uint8_t>(tag));
  w.blob(body);
}

std::span<const std::uint8_t> read_tagged(ByteReader& r, GroupTag tag, std::size_t len) {
  if (r.u8() != static_cast<std::uint8_t>(tag)) throw FormatError("group tag mismatch");
  auto body = r.blob();
  if (body.size() != len) throw FormatError("bad element length");
  return body;
}

}  // namespace

class PairingSuite::Timer {
 public:
  Timer(const PairingSuite& s, std::chrono::nanoseconds& slot)
      : slot_(s.timing_ ? &slot : nullptr),
        start_(slot_ != nullptr ? std::chrono::steady_clock::now() : std::chrono::steady_clock::time_point{}) {}
  ~Timer() {
    if (slot_ != nullptr) *slot_ += std::chrono::steady_clock::now() - start_;
  }

 private:
  std::chrono::nanoseconds* slot_;
  std::chrono::steady_clock::time_point start_;
};

Scalar Scalar::inverse() const {
  if (v_.is_zero()) throw InvalidArgument("inverse of zero scalar");
  return Scalar(v_.inverse());
}

PairingSuite::PairingSuite(SecurityLevel level)
    : level_(level), curve_(&BnCurve::get(curve_for(level))) {}

Scalar PairingSuite::scalar(std::uint64_t v) const { return Scalar(math::Fp::from_u64(curve_->fr(), v)); }

Scalar PairingSuite::random_scalar(Rng& rng) const {
  const auto& fr = curve_->fr();
  const std::size_t bits = fr.bits();
  const std::size_t nbytes = fr.byte_len();
  std::array<std::uint8_t, 32> buf{};
  for (;;) {
    rng.fill(std::span(buf.data(), nbytes));
    Limbs x{};
    for (std::size_t i = 0; i < nbytes; ++i) x[i / 8] |= static_cast<std::uint64_t>(buf[i]) << (8 * (i % 8));
    if (bits % 64 != 0) x[bits / 64] &= (std::uint64_t{1} << (bits % 64)) - 1;
    for (std::size_t i = bits / 64 + (bits % 64 != 0 ? 1 : 0); i < 4; ++i) x[i] = 0;
    if (math::limbs_less(x, fr.modulus())) return Scalar(math::Fp::from_canonical(fr, x));
  }
}

G1 PairingSuite::exp(const G1& base, const Scalar& e) {
  Timer t(*this, times_.exp);
  ++counters_.exp_g1;
  return G1(*curve_, curve_->mul(base.p_, e.v_.canonical()));
}

G2 PairingSuite::exp(const G2& base, const Scalar& e) {
  Timer t(*this, times_.exp);
  ++counters_.exp_g2;
  return G2(*curve_, curve_->mul(base.p_, e.v_.canonical()));
}

GT PairingSuite::exp(const GT& base, const Scalar& e) {
  Timer t(*this, times_.exp);
  ++counters_.exp_gt;
  return GT(curve_->gt_pow(base.v_, e.v_.canonical()));
}

GT PairingSuite::pair(const G1& x, const G2& y) {
  Timer t(*this, times_.pairing);
  ++counters_.pairings;
  return GT(curve_->pairing(x.p_, y.p_));
}

G1 PairingSuite::hash_to_group(std::string_view domain_tag, std::span<const std::uint8_t> input) {
  Timer t(*this, times_.hash);
  ++counters_.hash_to_group;
  // x = H(tag, input, ctr) widened by 128 bits before reduction; first ctr
  // giving a point wins, the sign of y comes from one more hash bit.
  const std::size_t need = curve_->fp().byte_len() + 16;
  ByteWriter prefix;
  prefix.str(domain_tag);
  prefix.blob(input);
  for (std::uint32_t ctr = 0;; ++ctr) {
    Bytes wide;
    for (std::uint8_t block = 0; wide.size() < need; ++block) {
      Sha256 h;
      h.update(prefix.bytes());
      std::array<std::uint8_t, 5> tail{static_cast<std::uint8_t>(ctr), static_cast<std::uint8_t>(ctr >> 8),
                                       static_cast<std::uint8_t>(ctr >> 16),
                                       static_cast<std::uint8_t>(ctr >> 24), block};
      h.update(tail);
      auto d = h.finish();
      wide.insert(wide.end(), d.begin(), d.end());
    }
    const bool flip = (wide[need] & 1U) != 0;
    wide.resize(need);
    math::Fp x = math::Fp::from_canonical(curve_->fp(), curve_->fp().reduce_be(wide));
    math::G1Point p;
    if (curve_->lift_x(x, p)) {
      // cofactor of G1 is 1 on BN curves
      return G1(*curve_, flip ? curve_->neg(p) : p);
    }
  }
}

G1 PairingSuite::hash_to_group(std::string_view domain_tag, std::string_view input) {
  return hash_to_group(domain_tag, std::span(reinterpret_cast<const std::uint8_t*>(input.data()), input.size()));
}

void PairingSuite::write(ByteWriter& w, const Scalar& v) const {
  Bytes body(curve_->fr().byte_len());
  v.v_.to_bytes(body);
  write_tagged(w, GroupTag::Zr, body);
}

void PairingSuite::write(ByteWriter& w, const G1& v) const { write_tagged(w, GroupTag::G1, curve_->encode(v.p_)); }
void PairingSuite::write(ByteWriter& w, const G2& v) const { write_tagged(w, GroupTag::G2, curve_->encode(v.p_)); }
void PairingSuite::write(ByteWriter& w, const GT& v) const { write_tagged(w, GroupTag::GT, curve_->encode(v.v_)); }

Scalar PairingSuite::read_scalar(ByteReader& r) const {
  auto body = read_tagged(r, GroupTag::Zr, curve_->fr().byte_len());
  math::Fp v;
  if (!math::Fp::from_bytes(curve_->fr(), body, v)) throw FormatError("scalar out of range");
  return Scalar(v);
}

G1 PairingSuite::read_g1(ByteReader& r) const {
  auto body = read_tagged(r, GroupTag::G1, curve_->g1_bytes());
  math::G1Point p;
  if (!curve_->decode(body, p)) throw FormatError("invalid G1 element");
  return G1(*curve_, p);
}

G2 PairingSuite::read_g2(ByteReader& r) const {
  auto body = read_tagged(r, GroupTag::G2, curve_->g2_bytes());
  math::G2Point p;
  if (!curve_->decode(body, p)) throw FormatError("invalid G2 element");
  return G2(*curve_, p);
}

GT PairingSuite::read_gt(ByteReader& r) const {
  auto body = read_tagged(r, GroupTag::GT, curve_->gt_bytes());
  math::Fp12 v;
  if (!curve_->decode(body, v)) throw FormatError("invalid GT element");
  return GT(v);
}

Bytes PairingSuite::parameter_bytes() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(level_));
  write(w, g1());
  write(w, g2());
  return w.take();
}

}  // namespace abe
