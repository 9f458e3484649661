#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "abe/bytes.hpp"
#include "abe/math/bn_curve.hpp"
#include "abe/rng.hpp"

namespace abe {

enum class SecurityLevel : std::uint8_t { S80 = 0, S112 = 1, S128 = 2 };

int level_bits(SecurityLevel level);
// 80, 112 or 128; anything else throws InvalidArgument.
SecurityLevel level_from_bits(int bits);
// Wire byte; unknown values throw FormatError.
SecurityLevel level_from_byte(std::uint8_t b);

enum class GroupTag : std::uint8_t { Zr = 0, G1 = 1, G2 = 2, GT = 3 };

struct OpCounters {
  std::uint64_t exp_g1 = 0;
  std::uint64_t exp_g2 = 0;
  std::uint64_t exp_gt = 0;
  std::uint64_t pairings = 0;
  std::uint64_t hash_to_group = 0;

  std::uint64_t exponentiations() const { return exp_g1 + exp_g2 + exp_gt; }
  OpCounters operator-(const OpCounters& o) const {
    return {exp_g1 - o.exp_g1, exp_g2 - o.exp_g2, exp_gt - o.exp_gt, pairings - o.pairings,
            hash_to_group - o.hash_to_group};
  }
  bool operator==(const OpCounters&) const = default;
};

// Accumulated wall time per operation class, filled only while timing is on.
struct OpTimes {
  std::chrono::nanoseconds hash{0};
  std::chrono::nanoseconds exp{0};
  std::chrono::nanoseconds pairing{0};

  OpTimes operator-(const OpTimes& o) const {
    return {hash - o.hash, exp - o.exp, pairing - o.pairing};
  }
};

class PairingSuite;

// Element of Zr. Arithmetic is free (not an instrumented operation).
class Scalar {
 public:
  Scalar() = default;

  Scalar operator+(const Scalar& o) const { return Scalar(v_ + o.v_); }
  Scalar operator-(const Scalar& o) const { return Scalar(v_ - o.v_); }
  Scalar operator*(const Scalar& o) const { return Scalar(v_ * o.v_); }
  Scalar operator-() const { return Scalar(-v_); }
  Scalar inverse() const;
  bool is_zero() const { return v_.is_zero(); }
  bool operator==(const Scalar& o) const { return v_ == o.v_; }
  math::Limbs canonical() const { return v_.canonical(); }

 private:
  friend class PairingSuite;
  explicit Scalar(const math::Fp& v) : v_(v) {}
  math::Fp v_;
};

// Group elements, written multiplicatively. The group operation is free;
// exponentiation goes through the suite so it is counted.
class G1 {
 public:
  G1() = default;
  G1 operator*(const G1& o) const { return G1(*c_, c_->add(p_, o.p_)); }
  G1 inverse() const { return G1(*c_, c_->neg(p_)); }
  bool is_identity() const { return p_.infinity; }
  bool operator==(const G1& o) const { return p_ == o.p_; }
  const math::G1Point& point() const { return p_; }

 private:
  friend class PairingSuite;
  G1(const math::BnCurve& c, const math::G1Point& p) : c_(&c), p_(p) {}
  const math::BnCurve* c_ = nullptr;
  math::G1Point p_;
};

class G2 {
 public:
  G2() = default;
  G2 operator*(const G2& o) const { return G2(*c_, c_->add(p_, o.p_)); }
  G2 inverse() const { return G2(*c_, c_->neg(p_)); }
  bool is_identity() const { return p_.infinity; }
  bool operator==(const G2& o) const { return p_ == o.p_; }
  const math::G2Point& point() const { return p_; }

 private:
  friend class PairingSuite;
  G2(const math::BnCurve& c, const math::G2Point& p) : c_(&c), p_(p) {}
  const math::BnCurve* c_ = nullptr;
  math::G2Point p_;
};

class GT {
 public:
  GT() = default;
  GT operator*(const GT& o) const { return GT(v_ * o.v_); }
  // Elements of GT are unitary, so the inverse is the conjugate.
  GT inverse() const { return GT(v_.conj()); }
  bool is_identity() const { return v_ == math::Fp12::one(v_.c0.c0.c0.field()); }
  bool operator==(const GT& o) const { return v_ == o.v_; }
  bool operator!=(const GT& o) const { return !(v_ == o.v_); }
  const math::Fp12& value() const { return v_; }

 private:
  friend class PairingSuite;
  explicit GT(const math::Fp12& v) : v_(v) {}
  math::Fp12 v_;
};

// Bilinear group context for one security level. Counts every
// exponentiation, pairing and hash-to-group call. Not thread safe; use one
// suite per thread.
class PairingSuite {
 public:
  explicit PairingSuite(SecurityLevel level);

  SecurityLevel level() const { return level_; }
  const math::BnCurve& curve() const { return *curve_; }
  std::size_t scalar_bits() const { return curve_->fr().bits(); }
  std::size_t field_bits() const { return curve_->fp().bits(); }

  G1 g1() const { return G1(*curve_, curve_->g1()); }
  G2 g2() const { return G2(*curve_, curve_->g2()); }
  GT gt_identity() const { return GT(math::Fp12::one(curve_->fp())); }

  Scalar scalar(std::uint64_t v) const;
  Scalar random_scalar(Rng& rng) const;

  G1 exp(const G1& base, const Scalar& e);
  G2 exp(const G2& base, const Scalar& e);
  GT exp(const GT& base, const Scalar& e);
  GT pair(const G1& x, const G2& y);
  // Deterministic map to G1 (SHA-256 try-and-increment). The domain tag
  // separates call sites.
  G1 hash_to_group(std::string_view domain_tag, std::span<const std::uint8_t> input);
  G1 hash_to_group(std::string_view domain_tag, std::string_view input);

  OpCounters counters() const { return counters_; }
  void set_timing(bool on) { timing_ = on; }
  OpTimes times() const { return times_; }

  // Tagged, length-prefixed encodings: tag u8 | len u32 LE | canonical bytes.
  void write(ByteWriter& w, const Scalar& v) const;
  void write(ByteWriter& w, const G1& v) const;
  void write(ByteWriter& w, const G2& v) const;
  void write(ByteWriter& w, const GT& v) const;
  Scalar read_scalar(ByteReader& r) const;
  G1 read_g1(ByteReader& r) const;
  G2 read_g2(ByteReader& r) const;
  GT read_gt(ByteReader& r) const;

  // Untagged canonical bytes of a GT element (key derivation input).
  Bytes gt_bytes(const GT& v) const { return curve_->encode(v.value()); }
  // Serialized generators, identifying the parameter set.
  Bytes parameter_bytes() const;

 private:
  class Timer;
  SecurityLevel level_;
  const math::BnCurve* curve_;
  OpCounters counters_;
  OpTimes times_;
  bool timing_ = false;
};

}  // namespace abe
