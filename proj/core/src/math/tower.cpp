#include "abe/math/tower.hpp"

namespace abe::math {

namespace {

// (x0 + x1 v + x2 v^2)(y0 + y1 v)
Fp6 mul_sparse01(const Fp6& x, const Fp2& y0, const Fp2& y1) {
  Fp2 a = x.c0 * y0;
  Fp2 b = x.c1 * y1;
  Fp2 r0 = (x.c2 * y1).mul_by_xi() + a;
  Fp2 r1 = (x.c0 + x.c1) * (y0 + y1) - a - b;
  Fp2 r2 = b + x.c2 * y0;
  return {r0, r1, r2};
}

Fp6 scale(const Fp6& x, const Fp& s) { return {x.c0 * s, x.c1 * s, x.c2 * s}; }

// Squaring in Fp4 = Fp2[s]/(s^2 - xi).
void fp4_square(Fp2& r0, Fp2& r1, const Fp2& x0, const Fp2& x1) {
  Fp2 t0 = x0.square();
  Fp2 t1 = x1.square();
  r0 = t1.mul_by_xi() + t0;
  r1 = (x0 + x1).square() - t0 - t1;
}

}  // namespace

Fp12 Fp12::frobenius(const FrobeniusTable& t, int k) const {
  const auto& g = t.gamma[static_cast<std::size_t>(k)];
  const bool odd = (k & 1) != 0;
  auto map = [&](const Fp2& x, std::size_t j) { return (odd ? x.conj() : x) * g[j]; };
  Fp12 r;
  r.c0 = {map(c0.c0, 0), map(c0.c1, 2), map(c0.c2, 4)};
  r.c1 = {map(c1.c0, 1), map(c1.c1, 3), map(c1.c2, 5)};
  return r;
}

Fp12 Fp12::mul_by_line(const Fp& a0, const Fp2& b0, const Fp2& b1) const {
  Fp6 a = scale(c0, a0);
  Fp6 b = mul_sparse01(c1, b0, b1);
  Fp2 a0_2{a0, Fp::zero(a0.field())};
  Fp6 m = mul_sparse01(c0 + c1, b0 + a0_2, b1);
  return {a + b.mul_by_v(), m - a - b};
}

Fp12 Fp12::cyclotomic_square() const {
  // Granger-Scott: view the element as a + b z + c z^2 over Fp4 with z^3 = s.
  const Fp2& f0 = c0.c0;
  const Fp2& f1 = c1.c0;
  const Fp2& f2 = c0.c1;
  const Fp2& f3 = c1.c1;
  const Fp2& f4 = c0.c2;
  const Fp2& f5 = c1.c2;
  Fp2 a0, a1, b0, b1, s0, s1;
  fp4_square(a0, a1, f0, f3);
  fp4_square(b0, b1, f1, f4);
  fp4_square(s0, s1, f2, f5);

  auto three = [](const Fp2& x) { return x.dbl() + x; };
  Fp2 n0 = three(a0) - f0.dbl();
  Fp2 n3 = three(a1) + f3.dbl();
  Fp2 n1 = three(s1.mul_by_xi()) + f1.dbl();
  Fp2 n4 = three(s0) - f4.dbl();
  Fp2 n2 = three(b0) - f2.dbl();
  Fp2 n5 = three(b1) + f5.dbl();
  return {{n0, n2, n4}, {n1, n3, n5}};
}

}  // namespace abe::math
