#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "abe/math/field.hpp"
#include "abe/math/tower.hpp"

// Barreto-Naehrig curves E: y^2 = x^3 + b over Fp with a D-type sextic twist
// E': y^2 = x^3 + b/xi over Fp2, and the optimal ate pairing.
namespace abe::math {

enum class CurveId : std::uint8_t { BN160 = 0, BN224 = 1, BN256 = 2 };

struct G1Point {
  Fp x, y;
  bool infinity = true;
  bool operator==(const G1Point& o) const {
    return infinity == o.infinity && (infinity || (x == o.x && y == o.y));
  }
};

struct G2Point {
  Fp2 x, y;
  bool infinity = true;
  bool operator==(const G2Point& o) const {
    return infinity == o.infinity && (infinity || (x == o.x && y == o.y));
  }
};

class BnCurve {
 public:
  // Immutable process-wide instance per curve, built on first use.
  static const BnCurve& get(CurveId id);

  BnCurve(const BnCurve&) = delete;
  BnCurve& operator=(const BnCurve&) = delete;

  CurveId id() const { return id_; }
  const PrimeField& fp() const { return fp_; }
  // Scalar field, modulus r = #G1 = #G2 = #GT.
  const PrimeField& fr() const { return fr_; }
  const Limbs& order() const { return fr_.modulus(); }
  const Limbs& u() const { return u_; }

  const G1Point& g1() const { return g1_; }
  const G2Point& g2() const { return g2_; }
  const Fp& b() const { return b_; }
  const Fp2& b_twist() const { return b_twist_; }
  const FrobeniusTable& frobenius() const { return frob_; }

  bool on_curve(const G1Point& p) const;
  bool on_curve(const G2Point& p) const;

  G1Point add(const G1Point& a, const G1Point& b) const;
  G2Point add(const G2Point& a, const G2Point& b) const;
  G1Point neg(const G1Point& a) const;
  G2Point neg(const G2Point& a) const;
  G1Point mul(const G1Point& p, const Limbs& k) const;
  G2Point mul(const G2Point& p, const Limbs& k) const;

  // Point with the given x and even canonical y, if x^3 + b is a square.
  bool lift_x(const Fp& x, G1Point& out) const;

  Fp12 miller_loop(const G1Point& p, const G2Point& q) const;
  Fp12 final_exponentiation(const Fp12& f) const;
  Fp12 pairing(const G1Point& p, const G2Point& q) const {
    return final_exponentiation(miller_loop(p, q));
  }
  // Exponentiation in GT (elements of order r only). Splits the exponent
  // along the Frobenius endomorphism, f^p = f^(p mod r), into four short
  // exponents and runs a joint square-and-multiply.
  Fp12 gt_pow(const Fp12& f, const Limbs& e) const;
  // Generic square-and-multiply, no subgroup assumption. Test oracle use.
  static Fp12 pow_generic(const Fp12& f, std::span<const std::uint64_t> e);

  // Hard-part exponent (p^4 - p^2 + 1) / r as little-endian limbs.
  const std::vector<std::uint64_t>& hard_exponent() const { return hard_exp_; }

  std::size_t g1_bytes() const { return 1 + 2 * fp_.byte_len(); }
  std::size_t g2_bytes() const { return 1 + 4 * fp_.byte_len(); }
  std::size_t gt_bytes() const { return 12 * fp_.byte_len(); }
  std::vector<std::uint8_t> encode(const G1Point& p) const;
  std::vector<std::uint8_t> encode(const G2Point& p) const;
  std::vector<std::uint8_t> encode(const Fp12& f) const;
  bool decode(std::span<const std::uint8_t> in, G1Point& out) const;
  bool decode(std::span<const std::uint8_t> in, G2Point& out) const;
  bool decode(std::span<const std::uint8_t> in, Fp12& out) const;

 private:
  explicit BnCurve(CurveId id);
  ~BnCurve();
  Fp12 exp_by_u(const Fp12& f) const;

  CurveId id_;
  PrimeField fp_;
  PrimeField fr_;
  Limbs u_{};
  Limbs ate_loop_{};
  Fp b_;
  Fp2 b_twist_;
  G1Point g1_;
  G2Point g2_;
  FrobeniusTable frob_;
  std::vector<std::uint64_t> hard_exp_;
  struct Decomposition;
  std::unique_ptr<Decomposition> gls_;
};

}  // namespace abe::math
