#include "abe/math/field.hpp"

#include <gmp.h>

#include <stdexcept>

namespace abe::math {

namespace {

using u128 = unsigned __int128;

// out = a - b over 256 bits, returns borrow.
std::uint64_t sub_borrow(Limbs& out, const Limbs& a, const Limbs& b) {
  std::uint64_t borrow = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    u128 d = static_cast<u128>(a[i]) - b[i] - borrow;
    out[i] = static_cast<std::uint64_t>(d);
    borrow = static_cast<std::uint64_t>(d >> 64) & 1U;
  }
  return borrow;
}

std::uint64_t add_carry(Limbs& out, const Limbs& a, const Limbs& b) {
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    u128 s = static_cast<u128>(a[i]) + b[i] + carry;
    out[i] = static_cast<std::uint64_t>(s);
    carry = static_cast<std::uint64_t>(s >> 64);
  }
  return carry;
}

struct Mpz {
  mpz_t v;
  Mpz() { mpz_init(v); }
  ~Mpz() { mpz_clear(v); }
  Mpz(const Mpz&) = delete;
  Mpz& operator=(const Mpz&) = delete;
};

void to_mpz(mpz_t out, const Limbs& l) { mpz_import(out, 4, -1, sizeof(std::uint64_t), 0, 0, l.data()); }

Limbs from_mpz(const mpz_t in) {
  Limbs l{};
  if (mpz_sizeinbase(in, 2) > 256) throw std::logic_error("value exceeds 256 bits");
  std::size_t count = 0;
  mpz_export(l.data(), &count, -1, sizeof(std::uint64_t), 0, 0, in);
  return l;
}

}  // namespace

Limbs limbs_from_hex(std::string_view hex) {
  Mpz m;
  std::string s(hex);
  if (mpz_set_str(m.v, s.c_str(), 16) != 0) throw std::invalid_argument("bad hex literal");
  return from_mpz(m.v);
}

std::string limbs_to_hex(const Limbs& v) {
  Mpz m;
  to_mpz(m.v, v);
  std::string out(mpz_sizeinbase(m.v, 16) + 2, '\0');
  mpz_get_str(out.data(), 16, m.v);
  out.resize(std::char_traits<char>::length(out.c_str()));
  return out;
}

bool limbs_less(const Limbs& a, const Limbs& b) {
  for (std::size_t i = 4; i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

bool limbs_is_zero(const Limbs& v) { return (v[0] | v[1] | v[2] | v[3]) == 0; }

std::size_t limbs_bit_length(const Limbs& v) {
  for (std::size_t i = 4; i-- > 0;) {
    if (v[i] != 0) return i * 64 + 64 - static_cast<std::size_t>(__builtin_clzll(v[i]));
  }
  return 0;
}

PrimeField::PrimeField(std::string_view modulus_hex, std::uint64_t xi_c) : xi_c_(xi_c) {
  p_ = limbs_from_hex(modulus_hex);
  if ((p_[0] & 1U) == 0) throw std::invalid_argument("modulus must be odd");
  bits_ = limbs_bit_length(p_);

  // n0 = -p^{-1} mod 2^64 by Newton iteration.
  std::uint64_t inv = 1;
  for (int i = 0; i < 7; ++i) inv *= 2 - p_[0] * inv;
  n0_ = ~inv + 1;

  Mpz p, t;
  to_mpz(p.v, p_);
  mpz_set_ui(t.v, 1);
  mpz_mul_2exp(t.v, t.v, 512);
  mpz_mod(t.v, t.v, p.v);
  r2_ = from_mpz(t.v);
  mpz_set_ui(t.v, 1);
  mpz_mul_2exp(t.v, t.v, 256);
  mpz_mod(t.v, t.v, p.v);
  one_ = from_mpz(t.v);
  mpz_add_ui(t.v, p.v, 1);
  mpz_fdiv_q_2exp(t.v, t.v, 2);
  sqrt_exp_ = from_mpz(t.v);
  mpz_sub_ui(t.v, p.v, 2);
  p_minus_2_ = from_mpz(t.v);
}

void PrimeField::add(Limbs& out, const Limbs& a, const Limbs& b) const {
  Limbs s;
  std::uint64_t carry = add_carry(s, a, b);
  Limbs d;
  std::uint64_t borrow = sub_borrow(d, s, p_);
  out = (carry != 0 || borrow == 0) ? d : s;
}

void PrimeField::sub(Limbs& out, const Limbs& a, const Limbs& b) const {
  Limbs d;
  if (sub_borrow(d, a, b) != 0) add_carry(d, d, p_);
  out = d;
}

void PrimeField::neg(Limbs& out, const Limbs& a) const {
  if (limbs_is_zero(a)) {
    out = a;
    return;
  }
  sub_borrow(out, p_, a);
}

void PrimeField::mul(Limbs& out, const Limbs& a, const Limbs& b) const {
  // CIOS Montgomery multiplication.
  std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < 4; ++i) {
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      u128 x = static_cast<u128>(a[j]) * b[i] + t[j] + c;
      t[j] = static_cast<std::uint64_t>(x);
      c = static_cast<std::uint64_t>(x >> 64);
    }
    u128 x = static_cast<u128>(t[4]) + c;
    t[4] = static_cast<std::uint64_t>(x);
    t[5] = static_cast<std::uint64_t>(x >> 64);

    std::uint64_t m = t[0] * n0_;
    x = static_cast<u128>(m) * p_[0] + t[0];
    c = static_cast<std::uint64_t>(x >> 64);
    for (std::size_t j = 1; j < 4; ++j) {
      x = static_cast<u128>(m) * p_[j] + t[j] + c;
      t[j - 1] = static_cast<std::uint64_t>(x);
      c = static_cast<std::uint64_t>(x >> 64);
    }
    x = static_cast<u128>(t[4]) + c;
    t[3] = static_cast<std::uint64_t>(x);
    t[4] = t[5] + static_cast<std::uint64_t>(x >> 64);
  }
  Limbs r{t[0], t[1], t[2], t[3]};
  Limbs d;
  std::uint64_t borrow = sub_borrow(d, r, p_);
  out = (t[4] != 0 || borrow == 0) ? d : r;
}

void PrimeField::to_mont(Limbs& out, const Limbs& canonical) const { mul(out, canonical, r2_); }

void PrimeField::from_mont(Limbs& out, const Limbs& mont) const {
  static const Limbs kOne{1, 0, 0, 0};
  mul(out, mont, kOne);
}

void PrimeField::inv(Limbs& out, const Limbs& a) const {
  Limbs c;
  from_mont(c, a);
  Mpz x, p;
  to_mpz(x.v, c);
  to_mpz(p.v, p_);
  if (mpz_invert(x.v, x.v, p.v) == 0) throw std::domain_error("inverse of zero");
  to_mont(out, from_mpz(x.v));
}

Limbs PrimeField::reduce_be(std::span<const std::uint8_t> bytes) const {
  Mpz x, p;
  mpz_import(x.v, bytes.size(), 1, 1, 1, 0, bytes.data());
  to_mpz(p.v, p_);
  mpz_mod(x.v, x.v, p.v);
  return from_mpz(x.v);
}

Fp Fp::from_u64(const PrimeField& f, std::uint64_t x) { return from_canonical(f, Limbs{x, 0, 0, 0}); }

Fp Fp::from_canonical(const PrimeField& f, const Limbs& x) {
  Fp r(f);
  f.to_mont(r.v_, x);
  return r;
}

Fp Fp::from_hex(const PrimeField& f, std::string_view hex) { return from_canonical(f, limbs_from_hex(hex)); }

Limbs Fp::canonical() const {
  Limbs c;
  f_->from_mont(c, v_);
  return c;
}

Fp Fp::pow(const Limbs& e) const {
  Fp r = one(*f_);
  for (std::size_t i = limbs_bit_length(e); i-- > 0;) {
    r = r.square();
    if (limbs_bit(e, i)) r *= *this;
  }
  return r;
}

bool Fp::sqrt(Fp& out) const {
  Fp y = pow(f_->sqrt_exponent());
  if (y.square() != *this) return false;
  out = y;
  return true;
}

void Fp::to_bytes(std::span<std::uint8_t> out) const {
  Limbs c = canonical();
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t bit = 8 * (n - 1 - i);
    out[i] = bit < 256 ? static_cast<std::uint8_t>(c[bit / 64] >> (bit % 64)) : 0;
  }
}

bool Fp::from_bytes(const PrimeField& f, std::span<const std::uint8_t> in, Fp& out) {
  if (in.size() != f.byte_len()) return false;
  Limbs c{};
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t bit = 8 * (n - 1 - i);
    c[bit / 64] |= static_cast<std::uint64_t>(in[i]) << (bit % 64);
  }
  if (!limbs_less(c, f.modulus())) return false;
  out = from_canonical(f, c);
  return true;
}

}  // namespace abe::math
