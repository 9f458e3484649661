#!/usr/bin/env python3
"""Search BN curve parameters for each security level and print a C++ table.

For each target bit length the script picks the smallest positive u such that
p = 36u^4+36u^3+24u^2+6u+1 and r = 36u^4+36u^3+18u^2+6u+1 are prime with
p = 3 mod 4, then the smallest b with #E(Fp) = r, the smallest xi = c + i that
gives a D-type sextic twist of order r(2p - r), and deterministic generators.
"""
import sys
from gmpy2 import mpz, is_prime, isqrt, invert, powmod, legendre

def bn(u):
    p = 36*u**4 + 36*u**3 + 24*u**2 + 6*u + 1
    r = 36*u**4 + 36*u**3 + 18*u**2 + 6*u + 1
    return p, r

# ---- Fp2 = Fp[i]/(i^2+1)
class F2:
    def __init__(s, p): s.p = p
    def add(s, a, b): return ((a[0]+b[0]) % s.p, (a[1]+b[1]) % s.p)
    def sub(s, a, b): return ((a[0]-b[0]) % s.p, (a[1]-b[1]) % s.p)
    def mul(s, a, b):
        return ((a[0]*b[0]-a[1]*b[1]) % s.p, (a[0]*b[1]+a[1]*b[0]) % s.p)
    def inv(s, a):
        n = invert((a[0]*a[0]+a[1]*a[1]) % s.p, s.p)
        return (a[0]*n % s.p, (-a[1])*n % s.p)
    def pow(s, a, e):
        r = (mpz(1), mpz(0))
        for bit in bin(e)[2:]:
            r = s.mul(r, r)
            if bit == '1': r = s.mul(r, a)
        return r
    def is_square(s, a):
        return legendre((a[0]*a[0]+a[1]*a[1]) % s.p, s.p) != -1
    def sqrt(s, a):
        # p = 3 mod 4 algorithm (Adj-Rodriguez-Henriquez)
        p = s.p
        a1 = s.pow(a, (p-3)//4)
        alpha = s.mul(a1, s.mul(a1, a))
        a0 = s.mul(s.pow(alpha, p), alpha)
        if a0 == (p-1, 0): raise ValueError
        x0 = s.mul(a1, a)
        if alpha == (p-1, 0):
            return s.mul((0, 1), x0)
        b = s.pow(s.add((1, 0), alpha), (p-1)//2)
        return s.mul(b, x0)

def ec_add(F, P, Q, zero, mul, add, sub, inv):
    if P is None: return Q
    if Q is None: return P
    if P[0] == Q[0]:
        if add(P[1], Q[1]) == zero: return None
        lam = mul(mul(three(F, P[0]), P[0]), inv(add(P[1], P[1])))
    else:
        lam = mul(sub(Q[1], P[1]), inv(sub(Q[0], P[0])))
    x3 = sub(sub(mul(lam, lam), P[0]), Q[0])
    y3 = sub(mul(lam, sub(P[0], x3)), P[1])
    return (x3, y3)

def three(F, x):
    return F.add(F.add(x, x), x) if isinstance(x, tuple) else 3*x % F.p

class F1:
    def __init__(s, p): s.p = p
    def add(s, a, b): return (a+b) % s.p
    def sub(s, a, b): return (a-b) % s.p
    def mul(s, a, b): return (a*b) % s.p
    def inv(s, a): return invert(a, s.p)

def ec_mul(F, P, k, zero):
    R = None
    for bit in bin(k)[2:]:
        R = ec_add(F, R, R, zero, F.mul, F.add, F.sub, F.inv)
        if bit == '1':
            R = ec_add(F, R, P, zero, F.mul, F.add, F.sub, F.inv)
    return R

def search(bits):
    u = mpz(int(((mpz(2)**(bits-1))/36) ** 0.25))
    while True:
        p, r = bn(u)
        if p.bit_length() > bits: raise RuntimeError("no u")
        if p.bit_length() == bits and p % 4 == 3 and is_prime(p, 50) and is_prime(r, 50):
            return u, p, r
        u += 1

def params(bits):
    u, p, r = search(bits)
    F = F1(p)
    # G1: y^2 = x^3 + b with order r
    b = 1
    while True:
        x = mpz(1)
        while legendre((x**3 + b) % p, p) != 1: x += 1
        y = powmod((x**3 + b) % p, (p+1)//4, p)
        y = min(y, p - y)
        if ec_mul(F, (x, y), r, 0) is None: break
        b += 1
    g1 = (x, y)
    F2_ = F2(p)
    c = 1
    while True:
        xi = (mpz(c), mpz(1))
        ok = (not F2_.is_square(xi)) and F2_.pow(xi, (p*p-1)//3) != (1, 0)
        if ok:
            bt = F2_.mul((mpz(b), mpz(0)), F2_.inv(xi))
            # find a point on the twist
            x2 = (mpz(1), mpz(0))
            k = 0
            while True:
                rhs = F2_.add(F2_.mul(F2_.mul(x2, x2), x2), bt)
                if F2_.is_square(rhs): break
                k += 1
                x2 = (mpz(1), mpz(k))
            y2 = F2_.sqrt(rhs)
            assert F2_.mul(y2, y2) == rhs
            Q = (x2, y2)
            h2 = 2*p - r
            G = ec_mul(F2_, Q, h2, (0, 0))
            if G is not None and ec_mul(F2_, G, r, (0, 0)) is None:
                break
        c += 1
    return dict(bits=bits, u=u, p=p, r=r, b=b, xi=c, g1=g1, g2=G, bt=bt)

def hx(v): return '"' + format(int(v), 'x') + '"'

if __name__ == "__main__":
    for bits, name in [(160, "S80"), (224, "S112"), (256, "S128")]:
        P = params(bits)
        print(f"// {name}: p {P['p'].bit_length()} bits, r {P['r'].bit_length()} bits, xi = {P['xi']} + i", file=sys.stderr)
        print("    {")
        print(f"        {hx(P['u'])},")
        print(f"        {hx(P['p'])},")
        print(f"        {hx(P['r'])},")
        print(f"        {P['b']}, {P['xi']},")
        print(f"        {hx(P['g1'][0])}, {hx(P['g1'][1])},")
        g2 = P['g2']
        print(f"        {hx(g2[0][0])}, {hx(g2[0][1])},")
        print(f"        {hx(g2[1][0])}, {hx(g2[1][1])},")
        print("    },")
