#!/usr/bin/env python3
"""Independent oracle for the pairing backend.

Recomputes, with textbook affine formulas and plain integer arithmetic, every
golden value frozen into tests/vectors/group_golden.json:

  * the optimal ate pairing on BN254 (alt_bn128), via an UNOPTIMIZED Miller
    loop -- affine coordinates, plain binary expansion of 6u+2, generic line
    evaluations in Fp12, final exponentiation as one pow((p^12-1)/r) -- so it
    shares no code path or algebraic shortcut with the C++ implementation;
  * canonical compressed encodings of the generators and derived Pedersen
    bases (try-and-increment hash-to-curve, SHA-512);
  * hash_to_scalar vectors (SHA-512 wide reduction mod r);
  * scalar-multiplication and MSM spot vectors.

Run from the repo root:  python3 tests/oracles/gen_group_vectors.py
Writes tests/vectors/group_golden.json. The output is committed; tests load
the frozen file and never invoke this script.
"""

import hashlib
import json
import os

# ----------------------------------------------------------------------------
# curve constants (BN254 / alt_bn128)

u = 4965661367192848881
p = 36 * u**4 + 36 * u**3 + 24 * u**2 + 6 * u + 1
r = 36 * u**4 + 36 * u**3 + 18 * u**2 + 6 * u + 1
ate_loop = 6 * u + 2

assert p == 21888242871839275222246405745257275088696311157297823662689037894645226208583
assert r == 21888242871839275222246405745257275088548364400416034343698204186575808495617
assert p % 4 == 3

B1 = 3  # G1: y^2 = x^3 + 3


def inv_p(a):
    return pow(a, p - 2, p)


# ----------------------------------------------------------------------------
# tower: Fp2 = Fp[i]/(i^2+1), Fp6 = Fp2[v]/(v^3 - (9+i)), Fp12 = Fp6[w]/(w^2 - v)

class Fp2:
    __slots__ = ("c0", "c1")

    def __init__(self, c0=0, c1=0):
        self.c0 = c0 % p
        self.c1 = c1 % p

    def __add__(self, o):
        return Fp2(self.c0 + o.c0, self.c1 + o.c1)

    def __sub__(self, o):
        return Fp2(self.c0 - o.c0, self.c1 - o.c1)

    def __neg__(self):
        return Fp2(-self.c0, -self.c1)

    def __mul__(self, o):
        if isinstance(o, int):
            return Fp2(self.c0 * o, self.c1 * o)
        a0, a1, b0, b1 = self.c0, self.c1, o.c0, o.c1
        return Fp2(a0 * b0 - a1 * b1, a0 * b1 + a1 * b0)

    def __eq__(self, o):
        return self.c0 == o.c0 and self.c1 == o.c1

    def is_zero(self):
        return self.c0 == 0 and self.c1 == 0

    def conj(self):
        return Fp2(self.c0, -self.c1)

    def inv(self):
        n = inv_p((self.c0 * self.c0 + self.c1 * self.c1) % p)
        return Fp2(self.c0 * n, -self.c1 * n)

    def pow(self, e):
        acc, base = Fp2(1), self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def sqrt(self):
        # complex method, p = 3 mod 4
        if self.is_zero():
            return Fp2(0)
        if self.c1 == 0:
            if pow(self.c0, (p - 1) // 2, p) == 1:
                return Fp2(pow(self.c0, (p + 1) // 4, p))
            return Fp2(0, pow((-self.c0) % p, (p + 1) // 4, p))
        alpha = pow((self.c0 * self.c0 + self.c1 * self.c1) % p, (p + 1) // 4, p)
        if alpha * alpha % p != (self.c0 * self.c0 + self.c1 * self.c1) % p:
            return None
        delta = (self.c0 + alpha) * inv_p(2) % p
        if pow(delta, (p - 1) // 2, p) != 1:
            delta = (self.c0 - alpha) * inv_p(2) % p
        x0 = pow(delta, (p + 1) // 4, p)
        if x0 * x0 % p != delta:
            return None
        x1 = self.c1 * inv_p(2 * x0) % p
        cand = Fp2(x0, x1)
        return cand if cand * cand == self else None


XI = Fp2(9, 1)


class Fp6:
    __slots__ = ("c0", "c1", "c2")

    def __init__(self, c0=None, c1=None, c2=None):
        self.c0 = c0 if c0 is not None else Fp2()
        self.c1 = c1 if c1 is not None else Fp2()
        self.c2 = c2 if c2 is not None else Fp2()

    def __add__(self, o):
        return Fp6(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)

    def __sub__(self, o):
        return Fp6(self.c0 - o.c0, self.c1 - o.c1, self.c2 - o.c2)

    def __neg__(self):
        return Fp6(-self.c0, -self.c1, -self.c2)

    def __mul__(self, o):
        if isinstance(o, int):
            return Fp6(self.c0 * o, self.c1 * o, self.c2 * o)
        a0, a1, a2 = self.c0, self.c1, self.c2
        b0, b1, b2 = o.c0, o.c1, o.c2
        return Fp6(a0 * b0 + (a1 * b2 + a2 * b1) * XI,
                   a0 * b1 + a1 * b0 + (a2 * b2) * XI,
                   a0 * b2 + a1 * b1 + a2 * b0)

    def __eq__(self, o):
        return self.c0 == o.c0 and self.c1 == o.c1 and self.c2 == o.c2

    def is_zero(self):
        return self.c0.is_zero() and self.c1.is_zero() and self.c2.is_zero()

    def mul_v(self):
        return Fp6(self.c2 * XI, self.c0, self.c1)

    def inv(self):
        a0, a1, a2 = self.c0, self.c1, self.c2
        t0 = a0 * a0 - (a1 * a2) * XI
        t1 = (a2 * a2) * XI - a0 * a1
        t2 = a1 * a1 - a0 * a2
        d = (a0 * t0 + ((a2 * t1 + a1 * t2) * XI)).inv()
        return Fp6(t0 * d, t1 * d, t2 * d)


class Fp12:
    __slots__ = ("c0", "c1")

    def __init__(self, c0=None, c1=None):
        self.c0 = c0 if c0 is not None else Fp6()
        self.c1 = c1 if c1 is not None else Fp6()

    @staticmethod
    def one():
        return Fp12(Fp6(Fp2(1)))

    def __add__(self, o):
        return Fp12(self.c0 + o.c0, self.c1 + o.c1)

    def __sub__(self, o):
        return Fp12(self.c0 - o.c0, self.c1 - o.c1)

    def __neg__(self):
        return Fp12(-self.c0, -self.c1)

    def __mul__(self, o):
        if isinstance(o, int):
            return Fp12(self.c0 * o, self.c1 * o)
        a0, a1, b0, b1 = self.c0, self.c1, o.c0, o.c1
        return Fp12(a0 * b0 + (a1 * b1).mul_v(), a0 * b1 + a1 * b0)

    def __eq__(self, o):
        return self.c0 == o.c0 and self.c1 == o.c1

    def is_zero(self):
        return self.c0.is_zero() and self.c1.is_zero()

    def inv(self):
        d = (self.c0 * self.c0 - (self.c1 * self.c1).mul_v()).inv()
        return Fp12(self.c0 * d, -(self.c1 * d))

    def pow(self, e):
        acc, base = Fp12.one(), self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def coeffs(self):
        out = []
        for six in (self.c0, self.c1):
            for two in (six.c0, six.c1, six.c2):
                out.append(two.c0)
                out.append(two.c1)
        return out


def fp12_scalar(x):  # embed Fp into Fp12
    return Fp12(Fp6(Fp2(x)))


W = Fp12(Fp6(), Fp6(Fp2(1)))          # w
W2 = W * W                            # w^2 = v
W3 = W2 * W


# ----------------------------------------------------------------------------
# affine curve arithmetic, generic over the coefficient field

class Pt:
    """Affine point or None-style infinity; field must support the used ops."""

    def __init__(self, x, y, inf=False):
        self.x, self.y, self.inf = x, y, inf

    @staticmethod
    def infinity():
        return Pt(None, None, True)

    def neg(self):
        return self if self.inf else Pt(self.x, -self.y)

    def eq(self, o):
        if self.inf or o.inf:
            return self.inf and o.inf
        return self.x == o.x and self.y == o.y


def pt_add(a, b, field_inv):
    if a.inf:
        return b
    if b.inf:
        return a
    ints = isinstance(a.x, int)
    same_x = (a.x % p == b.x % p) if ints else a.x == b.x
    if same_x:
        ysum_zero = ((a.y + b.y) % p == 0) if ints else (a.y + b.y).is_zero()
        if ysum_zero:
            return Pt.infinity()
        lam = (a.x * a.x * 3) * field_inv(a.y * 2)
    else:
        lam = (b.y - a.y) * field_inv(b.x - a.x)
    x3 = lam * lam - a.x - b.x
    y3 = lam * (a.x - x3) - a.y
    if ints:
        x3, y3 = x3 % p, y3 % p
    return Pt(x3, y3)


def pt_mul(a, k, field_inv):
    acc = Pt.infinity()
    add = a
    while k:
        if k & 1:
            acc = pt_add(acc, add, field_inv)
        add = pt_add(add, add, field_inv)
        k >>= 1
    return acc


def fp_inv_wrap(x):
    return inv_p(x % p) if isinstance(x, int) else x.inv()


# G1 generator
G1 = Pt(1, 2)

# G2 generator on the twist y^2 = x^3 + 3/(9+i)  (canonical alt_bn128 generator)
G2 = Pt(
    Fp2(10857046999023057135944570762232829481370756359578518086990519993285655852781,
        11559732032986387107991004021392285783925812861821192530917403151452391805634),
    Fp2(8495653923123431417604973247489272438418190587263600148770280649306958101930,
        4082367875863433681332203403145435568316851327593401208105741076214120093531),
)

B2 = Fp2(3) * XI.inv()
assert G2.y * G2.y == G2.x * G2.x * G2.x + B2, "G2 generator not on twist curve"
assert pt_mul(G2, r, fp_inv_wrap).inf, "G2 generator not of order r"
assert pt_mul(G1, r, fp_inv_wrap).inf, "G1 generator not of order r"


def untwist(q):
    """E'(Fp2) -> E(Fp12):  (x, y) -> (x*w^2, y*w^3)."""
    x12 = Fp12(Fp6(q.x)) * W2
    y12 = Fp12(Fp6(q.y)) * W3
    return Pt(x12, y12)


def line(a, b, P):
    """Value at P of the line through a and b (or tangent if a == b), Fp12."""
    px, py = fp12_scalar(P.x), fp12_scalar(P.y)
    if a.x == b.x and not a.y == b.y:
        return px - a.x                      # vertical
    if a.eq(b):
        lam = (a.x * a.x * 3) * (a.y * 2).inv()
    else:
        lam = (b.y - a.y) * (b.x - a.x).inv()
    return py - a.y - lam * (px - a.x)


def pairing(P, Q):
    """Textbook optimal ate e(P, Q), P in G1, Q in G2 (twist coords)."""
    if Q.inf or P.inf:
        return Fp12.one()
    Qu = untwist(Q)
    f = Fp12.one()
    T = Qu
    bits = bin(ate_loop)[2:]
    fi = lambda z: z.inv()
    for bit in bits[1:]:
        f = f * f * line(T, T, P)
        T = pt_add(T, T, fi)
        if bit == "1":
            f = f * line(T, Qu, P)
            T = pt_add(T, Qu, fi)
    # the two Frobenius-twisted correction lines of the optimal ate pairing
    Q1 = Pt(Qu.x.pow(p), Qu.y.pow(p))
    Q2 = Pt(Q1.x.pow(p), Q1.y.pow(p))
    f = f * line(T, Q1, P)
    T = pt_add(T, Q1, fi)
    f = f * line(T, Q2.neg(), P)
    return f.pow((p**12 - 1) // r)


# ----------------------------------------------------------------------------
# canonical encodings (must match the C++ wire layer bit for bit)

def enc_int(x):
    return x.to_bytes(32, "big")


def g1_compress(pt):
    if pt.inf:
        return bytes(32)
    buf = bytearray(enc_int(pt.x))
    buf[0] |= 0x80
    if pt.y & 1:
        buf[0] |= 0x40
    return bytes(buf)


def g2_compress(pt):
    if pt.inf:
        return bytes(64)
    buf = bytearray(enc_int(pt.x.c1) + enc_int(pt.x.c0))
    buf[0] |= 0x80
    odd = (pt.y.c0 & 1) if pt.y.c0 != 0 else (pt.y.c1 & 1)
    if odd:
        buf[0] |= 0x40
    return bytes(buf)


def gt_encode(f):
    return b"".join(enc_int(c) for c in f.coeffs())


# ----------------------------------------------------------------------------
# hashing (identical algorithms to the C++ side)

def hash_to_scalar(tag: bytes, data: bytes) -> int:
    d = hashlib.sha512(bytes([len(tag)]) + tag + data).digest()
    return int.from_bytes(d, "big") % r


def hash_to_g1(tag: bytes, data: bytes = b"") -> Pt:
    for ctr in range(256):
        d = hashlib.sha512(bytes([len(tag)]) + tag + data + bytes([ctr])).digest()
        x = int.from_bytes(d[:48], "big") % p
        rhs = (x * x * x + B1) % p
        if pow(rhs, (p - 1) // 2, p) != 1:
            continue
        y = pow(rhs, (p + 1) // 4, p)
        if (y & 1) != (d[48] & 1):
            y = p - y
        return Pt(x, y)
    raise RuntimeError("no point found")


# ----------------------------------------------------------------------------
# emit

def main():
    out = {"curve": "bn254", "p": hex(p), "r": hex(r), "u": hex(u)}

    out["g1_gen"] = g1_compress(G1).hex()
    out["g2_gen"] = g2_compress(G2).hex()

    e = pairing(G1, G2)
    assert not e == Fp12.one(), "pairing degenerate"
    assert e.pow(r) == Fp12.one(), "pairing value not of order r"
    out["e_g1_g2"] = gt_encode(e).hex()

    # bilinearity spot vector: e(2*G1, 3*G2) must equal e(G1,G2)^6
    P2 = pt_mul(G1, 2, fp_inv_wrap)
    Q3 = pt_mul(G2, 3, fp_inv_wrap)
    e6 = pairing(P2, Q3)
    assert e6 == e.pow(6), "bilinearity failed in oracle"
    out["e_2g1_3g2"] = gt_encode(e6).hex()

    k = 0x1234567890ABCDEF_FEDCBA0987654321_0F0E0D0C0B0A0908 % r
    out["scalar_k"] = hex(k)
    out["k_g1"] = g1_compress(pt_mul(G1, k, fp_inv_wrap)).hex()
    out["k_g2"] = g2_compress(pt_mul(G2, k, fp_inv_wrap)).hex()

    # msm vector: 1*g + 2*(2g) + 3*(3g) ... 8 terms of i*(i*g) = sum i^2 * g
    s = sum(i * i for i in range(1, 9)) % r
    out["msm_8"] = g1_compress(pt_mul(G1, s, fp_inv_wrap)).hex()

    bases = {}
    for tag in [b"pisces/base/1", b"pisces/base/2", b"pisces/base/3",
                b"pisces/base/4", b"pisces/base/5", b"pisces/base/6",
                b"pisces/base/h"]:
        bases[tag.decode()] = g1_compress(hash_to_g1(tag)).hex()
    out["pedersen_bases"] = bases

    out["hash_to_scalar"] = {
        "pisces/fs/v1|": hex(hash_to_scalar(b"pisces/fs/v1", b"")),
        "pisces/fs/v1|abc": hex(hash_to_scalar(b"pisces/fs/v1", b"abc")),
        "t|": hex(hash_to_scalar(b"t", b"")),
    }

    here = os.path.dirname(os.path.abspath(__file__))
    dest = os.path.join(here, "..", "vectors", "group_golden.json")
    os.makedirs(os.path.dirname(dest), exist_ok=True)
    with open(dest, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print("wrote", os.path.normpath(dest))


if __name__ == "__main__":
    main()
