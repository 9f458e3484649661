#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abe::math {

using Limbs = std::array<std::uint64_t, 4>;

// Arithmetic modulo an odd prime below 2^256, Montgomery form with R = 2^256.
class PrimeField {
 public:
  explicit PrimeField(std::string_view modulus_hex, std::uint64_t xi_c = 0);

  const Limbs& modulus() const { return p_; }
  std::size_t bits() const { return bits_; }
  std::size_t byte_len() const { return (bits_ + 7) / 8; }
  // Real part of the quadratic/sextic non-residue xi = c + i (0 if unused).
  std::uint64_t xi_c() const { return xi_c_; }

  void add(Limbs& out, const Limbs& a, const Limbs& b) const;
  void sub(Limbs& out, const Limbs& a, const Limbs& b) const;
  void neg(Limbs& out, const Limbs& a) const;
  void mul(Limbs& out, const Limbs& a, const Limbs& b) const;
  void to_mont(Limbs& out, const Limbs& canonical) const;
  void from_mont(Limbs& out, const Limbs& mont) const;
  // Montgomery inverse; a must be non-zero.
  void inv(Limbs& out, const Limbs& a) const;

  const Limbs& one() const { return one_; }
  // (p + 1) / 4, valid because p = 3 mod 4 for every base field in use.
  const Limbs& sqrt_exponent() const { return sqrt_exp_; }
  const Limbs& minus_two() const { return p_minus_2_; }

  // Canonical value of an arbitrary-length big-endian integer reduced mod p.
  Limbs reduce_be(std::span<const std::uint8_t> bytes) const;

 private:
  Limbs p_{};
  Limbs r2_{};
  Limbs one_{};
  Limbs sqrt_exp_{};
  Limbs p_minus_2_{};
  std::uint64_t n0_ = 0;
  std::size_t bits_ = 0;
  std::uint64_t xi_c_ = 0;
};

Limbs limbs_from_hex(std::string_view hex);
std::string limbs_to_hex(const Limbs& v);
bool limbs_less(const Limbs& a, const Limbs& b);
bool limbs_is_zero(const Limbs& v);
std::size_t limbs_bit_length(const Limbs& v);
inline bool limbs_bit(const Limbs& v, std::size_t i) { return (v[i / 64] >> (i % 64)) & 1U; }

// Element of a prime field. Carries a pointer to its field; elements of
// different fields must never be combined.
class Fp {
 public:
  Fp() = default;
  explicit Fp(const PrimeField& f) : f_(&f) {}
  Fp(const PrimeField& f, const Limbs& mont) : f_(&f), v_(mont) {}

  static Fp zero(const PrimeField& f) { return Fp(f); }
  static Fp one(const PrimeField& f) { return Fp(f, f.one()); }
  static Fp from_u64(const PrimeField& f, std::uint64_t x);
  static Fp from_canonical(const PrimeField& f, const Limbs& x);
  static Fp from_hex(const PrimeField& f, std::string_view hex);

  const PrimeField& field() const { return *f_; }
  const Limbs& mont() const { return v_; }
  Limbs canonical() const;

  bool is_zero() const { return limbs_is_zero(v_); }
  bool is_one() const { return v_ == f_->one(); }

  Fp operator+(const Fp& o) const { Fp r(*f_); f_->add(r.v_, v_, o.v_); return r; }
  Fp operator-(const Fp& o) const { Fp r(*f_); f_->sub(r.v_, v_, o.v_); return r; }
  Fp operator*(const Fp& o) const { Fp r(*f_); f_->mul(r.v_, v_, o.v_); return r; }
  Fp operator-() const { Fp r(*f_); f_->neg(r.v_, v_); return r; }
  Fp& operator+=(const Fp& o) { f_->add(v_, v_, o.v_); return *this; }
  Fp& operator-=(const Fp& o) { f_->sub(v_, v_, o.v_); return *this; }
  Fp& operator*=(const Fp& o) { f_->mul(v_, v_, o.v_); return *this; }
  bool operator==(const Fp& o) const { return v_ == o.v_; }
  bool operator!=(const Fp& o) const { return v_ != o.v_; }

  Fp square() const { return *this * *this; }
  Fp dbl() const { return *this + *this; }
  Fp inverse() const { Fp r(*f_); f_->inv(r.v_, v_); return r; }
  Fp pow(const Limbs& e) const;
  // Square root for p = 3 mod 4; returns false when none exists.
  bool sqrt(Fp& out) const;

  // Fixed-width big-endian canonical encoding (field().byte_len() bytes).
  void to_bytes(std::span<std::uint8_t> out) const;
  static bool from_bytes(const PrimeField& f, std::span<const std::uint8_t> in, Fp& out);

 private:
  const PrimeField* f_ = nullptr;
  Limbs v_{};
};

}  // namespace abe::math
