#include "abe/math/bn_curve.hpp"

#include <gmp.h>

#include <algorithm>
#include <array>
#include <stdexcept>

namespace abe::math {

namespace {

struct CurveParams {
  const char* u;
  const char* p;
  const char* r;
  std::uint64_t b;
  std::uint64_t xi_c;
  const char* g1x;
  const char* g1y;
  const char* g2x0;
  const char* g2x1;
  const char* g2y0;
  const char* g2y1;
};

// Generated by tools/gen_bn_params.py. Version 1 of the parameter table;
// changing any entry invalidates every serialized key and ciphertext.
constexpr std::array<CurveParams, 3> kCurves{{
    {
        "57e22665f1",
        "8000001a68a178fbab75e8e904385de9f4c2f547",
        "8000001a68a178fbab7533e410f1b89653eaa801",
        5, 2,
        "2", "23529128cffeca6c0ec04126ca25de37bc59aa78",
        "675c2a0dcd312c203a1095a2dc77392a823a1606", "427443d968d814f4a840ed4d4018df50646fd706",
        "78686ffbd91becf902de518f4b364508e115c44e", "7a6e14c83469c082d9bba5afd675c516ce3979ad",
    },
    {
        "57e2266168cfbd",
        "800000000007ce695860ea123e100fb253fddf60f93b5bbb865863df",
        "800000000007ce695860ea123e0f5aad60c9e57d10a7890b7d853aa9",
        5, 2,
        "3", "36ff6b404a35f1fb5015e113b119c53c4d5c27ca60d2b60726a84a4a",
        "e29fb048bfb273a87144cafd0215965cddb901adb9bea54ae97d90c", "3b8918341e65e50dddbe5e978c57bf8a8a99ae8f98fae86814f7b07",
        "22bfbff6624e9e47d1fc4885bace42cb595cd7aedc494ef0bf5595bd", "2a0ebd997e19247c31ff1764ecc808705be3b5f43bc4ea036c29904",
    },
    {
        "57e2266168ce7265",
        "80000000000046e2ca749facf7b1c33b43bafa32e3edef142c0e9f3ac1e14eaf",
        "80000000000046e2ca749facf7b1c33a8eb606feea0f587122303f688fe4a799",
        10, 3,
        "1", "1dc392fd658e23965563a63353e3e2552809696b19fea45fc5ca5e023e779216",
        "4a943a9b611a0a1de2e0b0484a2b5ea8a09cd0835a3de451b3017492532ff78d", "487e1b41b2e355910d9550e3fbcdfd0dcbdac6708bbf1f0ee13c9a2852db8669",
        "127443738018de9baf88021e8496eb1bcaa9e95fc85bb8b3eb12bac8ed0a7b4c", "290d9aa037071d1f09dc0ba6f7882fb768d294630a4b014a66d94a2de5859195",
    },
}};

const CurveParams& params_for(CurveId id) { return kCurves.at(static_cast<std::size_t>(id)); }

struct Mpz {
  mpz_t v;
  Mpz() { mpz_init(v); }
  ~Mpz() { mpz_clear(v); }
  Mpz(const Mpz&) = delete;
  Mpz& operator=(const Mpz&) = delete;
};

void set_limbs(mpz_t out, const Limbs& l) { mpz_import(out, 4, -1, sizeof(std::uint64_t), 0, 0, l.data()); }

Fp2 pow_mpz(const Fp2& a, const mpz_t e) {
  Fp2 r = Fp2::one(a.field());
  for (std::size_t i = mpz_sizeinbase(e, 2); i-- > 0;) {
    r = r.square();
    if (mpz_tstbit(e, i) != 0) r *= a;
  }
  return r;
}

// Jacobian coordinates over Fp or Fp2, curve y^2 = x^3 + b (a = 0).
template <class F>
struct Jac {
  F X, Y, Z;
  bool inf() const { return Z.is_zero(); }
};

template <class F>
Jac<F> jac_from_affine(const PrimeField& f, const F& x, const F& y, bool infinity) {
  if (infinity) return {F::one(f), F::one(f), F::zero(f)};
  return {x, y, F::one(f)};
}

template <class F>
Jac<F> jac_double(const Jac<F>& p) {
  if (p.inf() || p.Y.is_zero()) return {p.X, p.Y, F::zero(p.X.field())};
  // dbl-2009-l
  F a = p.X.square();
  F b = p.Y.square();
  F c = b.square();
  F d = ((p.X + b).square() - a - c).dbl();
  F e = a.dbl() + a;
  F ff = e.square();
  F x3 = ff - d.dbl();
  F c8 = c.dbl().dbl().dbl();
  F y3 = e * (d - x3) - c8;
  F z3 = (p.Y * p.Z).dbl();
  return {x3, y3, z3};
}

template <class F>
Jac<F> jac_add(const Jac<F>& p, const Jac<F>& q) {
  if (p.inf()) return q;
  if (q.inf()) return p;
  // add-2007-bl
  F z1z1 = p.Z.square();
  F z2z2 = q.Z.square();
  F u1 = p.X * z2z2;
  F u2 = q.X * z1z1;
  F s1 = p.Y * q.Z * z2z2;
  F s2 = q.Y * p.Z * z1z1;
  F h = u2 - u1;
  F rr = (s2 - s1).dbl();
  if (h.is_zero()) {
    if (rr.is_zero()) return jac_double(p);
    return {p.X, p.Y, F::zero(p.X.field())};
  }
  F i = h.dbl().square();
  F j = h * i;
  F v = u1 * i;
  F x3 = rr.square() - j - v.dbl();
  F y3 = rr * (v - x3) - (s1 * j).dbl();
  F z3 = ((p.Z + q.Z).square() - z1z1 - z2z2) * h;
  return {x3, y3, z3};
}

template <class F>
void jac_to_affine(const Jac<F>& p, F& x, F& y, bool& infinity) {
  if (p.inf()) {
    infinity = true;
    x = F::zero(p.X.field());
    y = F::zero(p.X.field());
    return;
  }
  F zi = p.Z.inverse();
  F zi2 = zi.square();
  x = p.X * zi2;
  y = p.Y * zi2 * zi;
  infinity = false;
}

template <class F>
Jac<F> jac_mul(const Jac<F>& p, const Limbs& k) {
  // Fixed 4-bit window, most significant nibble first.
  std::array<Jac<F>, 16> table;
  table[0] = {F::one(p.X.field()), F::one(p.X.field()), F::zero(p.X.field())};
  table[1] = p;
  for (std::size_t i = 2; i < 16; ++i) table[i] = jac_add(table[i - 1], p);
  Jac<F> r = table[0];
  std::size_t bits = limbs_bit_length(k);
  std::size_t nibbles = (bits + 3) / 4;
  for (std::size_t n = nibbles; n-- > 0;) {
    for (int d = 0; d < 4; ++d) r = jac_double(r);
    unsigned w = static_cast<unsigned>((k[(4 * n) / 64] >> ((4 * n) % 64)) & 0xF);
    if (w != 0) r = jac_add(r, table[w]);
  }
  return r;
}

Fp12 fp12_from_coeffs(const std::array<Fp2, 6>& c) { return {{c[0], c[2], c[4]}, {c[1], c[3], c[5]}}; }

std::array<Fp2, 6> fp12_coeffs(const Fp12& f) { return {f.c0.c0, f.c1.c0, f.c0.c1, f.c1.c1, f.c0.c2, f.c1.c2}; }

}  // namespace

// Short lattice basis for {v : sum v_i (p mod r)^i = 0 mod r} (Galbraith-Scott,
// index-3 sublattice) and the first row of its inverse scaled by det.
struct BnCurve::Decomposition {
  Mpz basis[4][4];
  Mpz adj[4];
  Mpz det;
  Mpz order;

  explicit Decomposition(const Limbs& u_limbs, const Limbs& r_limbs) {
    Mpz u;
    set_limbs(u.v, u_limbs);
    set_limbs(order.v, r_limbs);
    // (u+1, u, u, -2u), (2u+1, -u, -u-1, -u), (2u, 2u+1, 2u+1, 2u+1), (u-1, 4u+2, -2u+1, u-1)
    const long coef[4][4][2] = {{{1, 1}, {1, 0}, {1, 0}, {-2, 0}},
                                {{2, 1}, {-1, 0}, {-1, -1}, {-1, 0}},
                                {{2, 0}, {2, 1}, {2, 1}, {2, 1}},
                                {{1, -1}, {4, 2}, {-2, 1}, {1, -1}}};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        mpz_mul_si(basis[i][j].v, u.v, coef[i][j][0]);
        if (coef[i][j][1] >= 0) {
          mpz_add_ui(basis[i][j].v, basis[i][j].v, static_cast<unsigned long>(coef[i][j][1]));
        } else {
          mpz_sub_ui(basis[i][j].v, basis[i][j].v, static_cast<unsigned long>(-coef[i][j][1]));
        }
      }
    }
    // adj[j] = cofactor(j, 0); det = sum_j basis[j][0] * adj[j]
    mpz_set_ui(det.v, 0);
    for (int j = 0; j < 4; ++j) {
      int rows[3];
      for (int k = 0, n = 0; k < 4; ++k) {
        if (k != j) rows[n++] = k;
      }
      Mpz m, t;
      auto e = [&](int rr, int cc) { return basis[rows[rr]][cc + 1].v; };
      // 3x3 determinant over columns 1..3
      mpz_set_ui(m.v, 0);
      const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
      for (int q = 0; q < 6; ++q) {
        mpz_mul(t.v, e(0, perm[q][0]), e(1, perm[q][1]));
        mpz_mul(t.v, t.v, e(2, perm[q][2]));
        if (q < 3) {
          mpz_add(m.v, m.v, t.v);
        } else {
          mpz_sub(m.v, m.v, t.v);
        }
      }
      if (j % 2 == 1) mpz_neg(m.v, m.v);
      mpz_set(adj[j].v, m.v);
      mpz_mul(t.v, basis[j][0].v, m.v);
      mpz_add(det.v, det.v, t.v);
    }
    if (mpz_sgn(det.v) < 0) {
      mpz_neg(det.v, det.v);
      for (auto& a : adj) mpz_neg(a.v, a.v);
    }
  }

  // v with e = sum v_i lambda^i (mod r), |v_i| about u.
  void split(const Limbs& e_limbs, Mpz (&v)[4]) const {
    Mpz e, c, t, twice_det;
    set_limbs(e.v, e_limbs);
    mpz_mul_2exp(twice_det.v, det.v, 1);
    mpz_set(v[0].v, e.v);
    for (int i = 1; i < 4; ++i) mpz_set_ui(v[i].v, 0);
    for (int j = 0; j < 4; ++j) {
      // c = round(e * adj[j] / det)
      mpz_mul(t.v, e.v, adj[j].v);
      mpz_mul_2exp(t.v, t.v, 1);
      mpz_add(t.v, t.v, det.v);
      mpz_fdiv_q(c.v, t.v, twice_det.v);
      for (int i = 0; i < 4; ++i) mpz_submul(v[i].v, c.v, basis[j][i].v);
    }
  }
};

BnCurve::~BnCurve() = default;

const BnCurve& BnCurve::get(CurveId id) {
  static const BnCurve c160(CurveId::BN160);
  static const BnCurve c224(CurveId::BN224);
  static const BnCurve c256(CurveId::BN256);
  switch (id) {
    case CurveId::BN160: return c160;
    case CurveId::BN224: return c224;
    case CurveId::BN256: return c256;
  }
  throw std::invalid_argument("unknown curve id");
}

BnCurve::BnCurve(CurveId id)
    : id_(id), fp_(params_for(id).p, params_for(id).xi_c), fr_(params_for(id).r) {
  const CurveParams& cp = params_for(id);
  u_ = limbs_from_hex(cp.u);

  Mpz u, p, r, t, e;
  set_limbs(u.v, u_);
  set_limbs(p.v, fp_.modulus());
  set_limbs(r.v, fr_.modulus());
  // 6u + 2
  mpz_mul_ui(t.v, u.v, 6);
  mpz_add_ui(t.v, t.v, 2);
  {
    std::size_t count = 0;
    mpz_export(ate_loop_.data(), &count, -1, sizeof(std::uint64_t), 0, 0, t.v);
  }

  b_ = Fp::from_u64(fp_, cp.b);
  Fp2 xi{Fp::from_u64(fp_, cp.xi_c), Fp::one(fp_)};
  b_twist_ = Fp2{b_, Fp::zero(fp_)} * xi.inverse();

  g1_ = {Fp::from_hex(fp_, cp.g1x), Fp::from_hex(fp_, cp.g1y), false};
  g2_ = {{Fp::from_hex(fp_, cp.g2x0), Fp::from_hex(fp_, cp.g2x1)},
         {Fp::from_hex(fp_, cp.g2y0), Fp::from_hex(fp_, cp.g2y1)},
         false};
  if (!on_curve(g1_) || !on_curve(g2_)) throw std::logic_error("generator not on curve");

  // gamma[k][j] = xi^(j (p^k - 1) / 6)
  for (int k = 1; k <= 3; ++k) {
    mpz_pow_ui(e.v, p.v, static_cast<unsigned long>(k));
    mpz_sub_ui(e.v, e.v, 1);
    mpz_divexact_ui(e.v, e.v, 6);
    Fp2 base = pow_mpz(xi, e.v);
    Fp2 acc = Fp2::one(fp_);
    for (std::size_t j = 0; j < 6; ++j) {
      frob_.gamma[static_cast<std::size_t>(k)][j] = acc;
      acc *= base;
    }
  }
  frob_.gamma[0].fill(Fp2::one(fp_));

  // (p^4 - p^2 + 1) / r
  mpz_pow_ui(e.v, p.v, 4);
  mpz_pow_ui(t.v, p.v, 2);
  mpz_sub(e.v, e.v, t.v);
  mpz_add_ui(e.v, e.v, 1);
  mpz_divexact(e.v, e.v, r.v);
  hard_exp_.assign((mpz_sizeinbase(e.v, 2) + 63) / 64, 0);
  std::size_t count = 0;
  mpz_export(hard_exp_.data(), &count, -1, sizeof(std::uint64_t), 0, 0, e.v);

  gls_ = std::make_unique<Decomposition>(u_, fr_.modulus());
}

bool BnCurve::on_curve(const G1Point& pt) const {
  if (pt.infinity) return true;
  return pt.y.square() == pt.x.square() * pt.x + b_;
}

bool BnCurve::on_curve(const G2Point& pt) const {
  if (pt.infinity) return true;
  return pt.y.square() == pt.x.square() * pt.x + b_twist_;
}

G1Point BnCurve::add(const G1Point& a, const G1Point& b) const {
  G1Point out;
  jac_to_affine(jac_add(jac_from_affine(fp_, a.x, a.y, a.infinity), jac_from_affine(fp_, b.x, b.y, b.infinity)), out.x,
                out.y, out.infinity);
  return out;
}

G2Point BnCurve::add(const G2Point& a, const G2Point& b) const {
  G2Point out;
  jac_to_affine(jac_add(jac_from_affine(fp_, a.x, a.y, a.infinity), jac_from_affine(fp_, b.x, b.y, b.infinity)), out.x,
                out.y, out.infinity);
  return out;
}

G1Point BnCurve::neg(const G1Point& a) const { return a.infinity ? a : G1Point{a.x, -a.y, false}; }
G2Point BnCurve::neg(const G2Point& a) const { return a.infinity ? a : G2Point{a.x, -a.y, false}; }

G1Point BnCurve::mul(const G1Point& pt, const Limbs& k) const {
  G1Point out;
  jac_to_affine(jac_mul(jac_from_affine(fp_, pt.x, pt.y, pt.infinity), k), out.x, out.y, out.infinity);
  return out;
}

G2Point BnCurve::mul(const G2Point& pt, const Limbs& k) const {
  G2Point out;
  jac_to_affine(jac_mul(jac_from_affine(fp_, pt.x, pt.y, pt.infinity), k), out.x, out.y, out.infinity);
  return out;
}

bool BnCurve::lift_x(const Fp& x, G1Point& out) const {
  Fp rhs = x.square() * x + b_;
  Fp y;
  if (!rhs.sqrt(y)) return false;
  if (y.canonical()[0] & 1U) y = -y;
  out = {x, y, false};
  return true;
}

Fp12 BnCurve::miller_loop(const G1Point& p, const G2Point& q) const {
  Fp12 f = Fp12::one(fp_);
  if (p.infinity || q.infinity) return f;
  const Fp neg_xp = -p.x;
  G2Point t = q;

  // Line through T with slope lambda, evaluated at P:
  // yP - lambda xP w + (lambda xT - yT) w^3.
  auto line = [&](const Fp2& lambda, const G2Point& at) {
    return std::array<Fp2, 2>{lambda * neg_xp, lambda * at.x - at.y};
  };
  auto add_step = [&](const G2Point& r) {
    if (t.x == r.x) {
      // Vertical line (T = -R) lies in Fp6 and is killed by the final
      // exponentiation; T = R cannot occur for points of prime order here.
      t.infinity = true;
      return;
    }
    Fp2 lambda = (r.y - t.y) * (r.x - t.x).inverse();
    auto l = line(lambda, t);
    f = f.mul_by_line(p.y, l[0], l[1]);
    Fp2 x3 = lambda.square() - t.x - r.x;
    Fp2 y3 = lambda * (t.x - x3) - t.y;
    t = {x3, y3, false};
  };

  for (std::size_t i = limbs_bit_length(ate_loop_) - 1; i-- > 0;) {
    Fp2 xx = t.x.square();
    Fp2 lambda = (xx.dbl() + xx) * t.y.dbl().inverse();
    auto l = line(lambda, t);
    f = f.square().mul_by_line(p.y, l[0], l[1]);
    Fp2 x3 = lambda.square() - t.x.dbl();
    Fp2 y3 = lambda * (t.x - x3) - t.y;
    t = {x3, y3, false};
    if (limbs_bit(ate_loop_, i)) add_step(q);
  }

  const auto& g = frob_.gamma;
  G2Point q1{q.x.conj() * g[1][2], q.y.conj() * g[1][3], false};
  G2Point q2neg{q.x * g[2][2], -(q.y * g[2][3]), false};
  add_step(q1);
  if (!t.infinity) add_step(q2neg);
  return f;
}

Fp12 BnCurve::exp_by_u(const Fp12& f) const {
  Fp12 r = f;
  for (std::size_t i = limbs_bit_length(u_) - 1; i-- > 0;) {
    r = r.cyclotomic_square();
    if (limbs_bit(u_, i)) r *= f;
  }
  return r;
}

Fp12 BnCurve::final_exponentiation(const Fp12& f) const {
  // Easy part: f^((p^6 - 1)(p^2 + 1)).
  Fp12 a = f.conj() * f.inverse();
  a = a.frobenius(frob_, 2) * a;

  // Hard part, addition chain of Scott et al. for BN curves with u > 0.
  Fp12 fu = exp_by_u(a);
  Fp12 fu2 = exp_by_u(fu);
  Fp12 fu3 = exp_by_u(fu2);
  Fp12 y0 = a.frobenius(frob_, 1) * a.frobenius(frob_, 2) * a.frobenius(frob_, 3);
  Fp12 y1 = a.conj();
  Fp12 y2 = fu2.frobenius(frob_, 2);
  Fp12 y3 = fu.frobenius(frob_, 1).conj();
  Fp12 y4 = (fu * fu2.frobenius(frob_, 1)).conj();
  Fp12 y5 = fu2.conj();
  Fp12 y6 = (fu3 * fu3.frobenius(frob_, 1)).conj();

  Fp12 t0 = y6.cyclotomic_square() * y4 * y5;
  Fp12 t1 = y3 * y5 * t0;
  t0 = t0 * y2;
  t1 = t1.cyclotomic_square() * t0;
  t1 = t1.cyclotomic_square();
  t0 = t1 * y1;
  t1 = t1 * y0;
  t0 = t0.cyclotomic_square();
  return t0 * t1;
}

Fp12 BnCurve::gt_pow(const Fp12& f, const Limbs& e) const {
  Mpz v[4];
  gls_->split(e, v);
  std::array<Fp12, 4> base{f, f.frobenius(frob_, 1), f.frobenius(frob_, 2), f.frobenius(frob_, 3)};
  std::array<std::array<std::uint64_t, 2>, 4> digits{};
  std::size_t top = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (mpz_sgn(v[i].v) < 0) {
      base[i] = base[i].conj();
      mpz_neg(v[i].v, v[i].v);
    }
    if (mpz_sizeinbase(v[i].v, 2) > 128) throw std::logic_error("exponent split out of range");
    std::size_t count = 0;
    mpz_export(digits[i].data(), &count, -1, sizeof(std::uint64_t), 0, 0, v[i].v);
    if (mpz_sgn(v[i].v) != 0) top = std::max(top, mpz_sizeinbase(v[i].v, 2));
  }

  std::array<Fp12, 16> table;
  table[0] = Fp12::one(fp_);
  for (unsigned mask = 1; mask < 16; ++mask) {
    unsigned low = mask & (~mask + 1);
    unsigned idx = static_cast<unsigned>(__builtin_ctz(low));
    table[mask] = (mask == low) ? base[idx] : table[mask ^ low] * base[idx];
  }

  Fp12 r = table[0];
  bool started = false;
  for (std::size_t bit = top; bit-- > 0;) {
    if (started) r = r.cyclotomic_square();
    unsigned mask = 0;
    for (unsigned i = 0; i < 4; ++i) {
      if ((digits[i][bit / 64] >> (bit % 64)) & 1U) mask |= 1U << i;
    }
    if (mask != 0) {
      r = started ? r * table[mask] : table[mask];
      started = true;
    }
  }
  return r;
}

Fp12 BnCurve::pow_generic(const Fp12& f, std::span<const std::uint64_t> e) {
  Fp12 r = Fp12::one(f.c0.c0.field());
  for (std::size_t i = e.size() * 64; i-- > 0;) {
    r = r.square();
    if ((e[i / 64] >> (i % 64)) & 1U) r *= f;
  }
  return r;
}

std::vector<std::uint8_t> BnCurve::encode(const G1Point& pt) const {
  std::vector<std::uint8_t> out(g1_bytes(), 0);
  if (pt.infinity) return out;
  const std::size_t n = fp_.byte_len();
  out[0] = 0x04;
  pt.x.to_bytes(std::span(out).subspan(1, n));
  pt.y.to_bytes(std::span(out).subspan(1 + n, n));
  return out;
}

std::vector<std::uint8_t> BnCurve::encode(const G2Point& pt) const {
  std::vector<std::uint8_t> out(g2_bytes(), 0);
  if (pt.infinity) return out;
  const std::size_t n = fp_.byte_len();
  out[0] = 0x04;
  pt.x.c0.to_bytes(std::span(out).subspan(1, n));
  pt.x.c1.to_bytes(std::span(out).subspan(1 + n, n));
  pt.y.c0.to_bytes(std::span(out).subspan(1 + 2 * n, n));
  pt.y.c1.to_bytes(std::span(out).subspan(1 + 3 * n, n));
  return out;
}

std::vector<std::uint8_t> BnCurve::encode(const Fp12& f) const {
  std::vector<std::uint8_t> out(gt_bytes(), 0);
  const std::size_t n = fp_.byte_len();
  auto c = fp12_coeffs(f);
  for (std::size_t j = 0; j < 6; ++j) {
    c[j].c0.to_bytes(std::span(out).subspan(2 * j * n, n));
    c[j].c1.to_bytes(std::span(out).subspan((2 * j + 1) * n, n));
  }
  return out;
}

bool BnCurve::decode(std::span<const std::uint8_t> in, G1Point& out) const {
  if (in.size() != g1_bytes()) return false;
  const std::size_t n = fp_.byte_len();
  if (in[0] == 0x00) {
    for (auto b : in) {
      if (b != 0) return false;
    }
    out = G1Point{Fp::zero(fp_), Fp::zero(fp_), true};
    return true;
  }
  if (in[0] != 0x04) return false;
  G1Point pt;
  pt.infinity = false;
  if (!Fp::from_bytes(fp_, in.subspan(1, n), pt.x) || !Fp::from_bytes(fp_, in.subspan(1 + n, n), pt.y)) return false;
  if (!on_curve(pt)) return false;
  out = pt;
  return true;
}

bool BnCurve::decode(std::span<const std::uint8_t> in, G2Point& out) const {
  if (in.size() != g2_bytes()) return false;
  const std::size_t n = fp_.byte_len();
  if (in[0] == 0x00) {
    for (auto b : in) {
      if (b != 0) return false;
    }
    out = G2Point{Fp2::zero(fp_), Fp2::zero(fp_), true};
    return true;
  }
  if (in[0] != 0x04) return false;
  G2Point pt;
  pt.infinity = false;
  if (!Fp::from_bytes(fp_, in.subspan(1, n), pt.x.c0) || !Fp::from_bytes(fp_, in.subspan(1 + n, n), pt.x.c1) ||
      !Fp::from_bytes(fp_, in.subspan(1 + 2 * n, n), pt.y.c0) ||
      !Fp::from_bytes(fp_, in.subspan(1 + 3 * n, n), pt.y.c1)) {
    return false;
  }
  if (!on_curve(pt)) return false;
  out = pt;
  return true;
}

bool BnCurve::decode(std::span<const std::uint8_t> in, Fp12& out) const {
  if (in.size() != gt_bytes()) return false;
  const std::size_t n = fp_.byte_len();
  std::array<Fp2, 6> c;
  for (std::size_t j = 0; j < 6; ++j) {
    if (!Fp::from_bytes(fp_, in.subspan(2 * j * n, n), c[j].c0) ||
        !Fp::from_bytes(fp_, in.subspan((2 * j + 1) * n, n), c[j].c1)) {
      return false;
    }
  }
  out = fp12_from_coeffs(c);
  return true;
}

}  // namespace abe::math
