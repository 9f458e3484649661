#pragma once

#include <array>

#include "abe/math/field.hpp"

// Fp2 = Fp[i]/(i^2 + 1), Fp6 = Fp2[v]/(v^3 - xi), Fp12 = Fp6[w]/(w^2 - v),
// with xi = c + i and c taken from the base field.
namespace abe::math {

inline Fp times_small(const Fp& a, std::uint64_t c) {
  Fp r = Fp::zero(a.field());
  Fp base = a;
  for (; c != 0; c >>= 1) {
    if (c & 1U) r += base;
    base = base.dbl();
  }
  return r;
}

struct Fp2 {
  Fp c0, c1;

  static Fp2 zero(const PrimeField& f) { return {Fp::zero(f), Fp::zero(f)}; }
  static Fp2 one(const PrimeField& f) { return {Fp::one(f), Fp::zero(f)}; }
  const PrimeField& field() const { return c0.field(); }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  bool operator==(const Fp2& o) const { return c0 == o.c0 && c1 == o.c1; }
  bool operator!=(const Fp2& o) const { return !(*this == o); }

  Fp2 operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
  Fp2 operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
  Fp2 operator-() const { return {-c0, -c1}; }
  Fp2 operator*(const Fp2& o) const {
    Fp a = c0 * o.c0;
    Fp b = c1 * o.c1;
    Fp m = (c0 + c1) * (o.c0 + o.c1);
    return {a - b, m - a - b};
  }
  Fp2 operator*(const Fp& s) const { return {c0 * s, c1 * s}; }
  Fp2& operator+=(const Fp2& o) { return *this = *this + o; }
  Fp2& operator-=(const Fp2& o) { return *this = *this - o; }
  Fp2& operator*=(const Fp2& o) { return *this = *this * o; }

  Fp2 square() const {
    Fp a = (c0 + c1) * (c0 - c1);
    Fp b = c0 * c1;
    return {a, b + b};
  }
  Fp2 dbl() const { return {c0.dbl(), c1.dbl()}; }
  Fp2 conj() const { return {c0, -c1}; }
  Fp2 inverse() const {
    Fp n = (c0.square() + c1.square()).inverse();
    return {c0 * n, -(c1 * n)};
  }
  Fp2 mul_by_xi() const {
    // (a + b i)(c + i) = (c a - b) + (a + c b) i
    const std::uint64_t c = field().xi_c();
    return {times_small(c0, c) - c1, c0 + times_small(c1, c)};
  }
  Fp2 pow(const Limbs& e) const {
    Fp2 r = one(field());
    for (std::size_t i = limbs_bit_length(e); i-- > 0;) {
      r = r.square();
      if (limbs_bit(e, i)) r *= *this;
    }
    return r;
  }
};

struct Fp6 {
  Fp2 c0, c1, c2;

  static Fp6 zero(const PrimeField& f) { return {Fp2::zero(f), Fp2::zero(f), Fp2::zero(f)}; }
  static Fp6 one(const PrimeField& f) { return {Fp2::one(f), Fp2::zero(f), Fp2::zero(f)}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  bool operator==(const Fp6& o) const { return c0 == o.c0 && c1 == o.c1 && c2 == o.c2; }

  Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
  Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
  Fp6 operator-() const { return {-c0, -c1, -c2}; }
  Fp6 operator*(const Fp6& o) const {
    Fp2 v0 = c0 * o.c0;
    Fp2 v1 = c1 * o.c1;
    Fp2 v2 = c2 * o.c2;
    Fp2 r0 = ((c1 + c2) * (o.c1 + o.c2) - v1 - v2).mul_by_xi() + v0;
    Fp2 r1 = (c0 + c1) * (o.c0 + o.c1) - v0 - v1 + v2.mul_by_xi();
    Fp2 r2 = (c0 + c2) * (o.c0 + o.c2) - v0 - v2 + v1;
    return {r0, r1, r2};
  }
  Fp6 square() const { return *this * *this; }
  // Multiply by v: (c0 + c1 v + c2 v^2) v = xi c2 + c0 v + c1 v^2.
  Fp6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }
  Fp6 inverse() const {
    Fp2 t0 = c0.square() - (c1 * c2).mul_by_xi();
    Fp2 t1 = c2.square().mul_by_xi() - c0 * c1;
    Fp2 t2 = c1.square() - c0 * c2;
    Fp2 den = c0 * t0 + (c2 * t1 + c1 * t2).mul_by_xi();
    Fp2 inv = den.inverse();
    return {t0 * inv, t1 * inv, t2 * inv};
  }
};

// Constants for the Frobenius maps on Fp12, gamma[k][j] = xi^(j (p^k - 1) / 6).
struct FrobeniusTable {
  std::array<std::array<Fp2, 6>, 4> gamma;
};

struct Fp12 {
  Fp6 c0, c1;

  static Fp12 one(const PrimeField& f) { return {Fp6::one(f), Fp6::zero(f)}; }

  bool operator==(const Fp12& o) const { return c0 == o.c0 && c1 == o.c1; }
  bool operator!=(const Fp12& o) const { return !(*this == o); }
  bool is_one() const { return *this == one(c0.c0.field()); }

  Fp12 operator*(const Fp12& o) const {
    Fp6 a = c0 * o.c0;
    Fp6 b = c1 * o.c1;
    Fp6 m = (c0 + c1) * (o.c0 + o.c1);
    return {a + b.mul_by_v(), m - a - b};
  }
  Fp12& operator*=(const Fp12& o) { return *this = *this * o; }
  Fp12 square() const {
    Fp6 ab = c0 * c1;
    Fp6 t = (c0 + c1) * (c0 + c1.mul_by_v());
    return {t - ab - ab.mul_by_v(), ab + ab};
  }
  // Equals f^(p^6); the inverse for elements of the cyclotomic subgroup.
  Fp12 conj() const { return {c0, -c1}; }
  Fp12 inverse() const {
    Fp6 den = (c0.square() - c1.square().mul_by_v()).inverse();
    return {c0 * den, -(c1 * den)};
  }
  // f^(p^k) for k in {1, 2, 3}.
  Fp12 frobenius(const FrobeniusTable& t, int k) const;

  // Multiply by a sparse line value a0 + (b0 + b1 v) w, a0 in Fp.
  Fp12 mul_by_line(const Fp& a0, const Fp2& b0, const Fp2& b1) const;

  // Squaring valid only for elements of the cyclotomic subgroup.
  Fp12 cyclotomic_square() const;
};

}  // namespace abe::math
