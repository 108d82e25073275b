"""Recursive inner-product argument (halving, Bulletproofs-style).

Proves knowledge of ``a, b`` with ``P = <a, G> + <b, H> + <a, b>*Q``.
Per round with challenge ``x``::

    G' = x^-1 * G_lo + x * G_hi        H' = x * H_lo + x^-1 * H_hi
    a' = x * a_lo + x^-1 * a_hi        b' = x^-1 * b_lo + x * b_hi
    P' = x^2 * L + P + x^-2 * R

The verifier never folds bases; it checks a single multiexp with the
per-index products of round challenges.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from zksvm.elements import ElementReader, ProofElements
from zksvm.errors import InvalidParameter
from zksvm.group import ORDER, Point, Scalar, multiexp
from zksvm.transcript import Transcript


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def log2(n: int) -> int:
    return n.bit_length() - 1


@dataclass(frozen=True)
class IpaProof(ProofElements):
    L: tuple[Point, ...]
    R: tuple[Point, ...]
    a: Scalar
    b: Scalar

    def elements(self):
        pts = []
        for left, right in zip(self.L, self.R):
            pts += [left, right]
        return pts, [self.a, self.b]

    @classmethod
    def read(cls, reader: ElementReader, n: int):
        L, R = [], []
        for _ in range(log2(n)):
            L.append(reader.point())
            R.append(reader.point())
        return cls(tuple(L), tuple(R), reader.scalar(), reader.scalar())


def ipa_prove(G: Sequence[Point], H: Sequence[Point], Q: Point, a: Sequence[Scalar], b: Sequence[Scalar],
              t: Transcript) -> IpaProof:
    n = len(G)
    if not (n == len(H) == len(a) == len(b)):
        raise InvalidParameter("inner-product argument inputs differ in length")
    if not is_power_of_two(n):
        raise InvalidParameter(f"inner-product argument needs a power-of-two length, got {n}")
    G, H = list(G), list(H)
    # plain ints mod ORDER in the inner loops; Scalar objects cost too much here
    a = [int(x) % ORDER for x in a]
    b = [int(x) % ORDER for x in b]
    # folded bases are never materialized: original generator i sits in
    # folded slot i mod m with a running coefficient
    cg = [1] * n
    ch = [1] * n
    Ls, Rs = [], []
    t.absorb_int(b"ipa-n", n)
    m = n
    while m > 1:
        half = m // 2
        a_lo, a_hi, b_lo, b_hi = a[:half], a[half:], b[:half], b[half:]
        c_l = sum(x * y for x, y in zip(a_lo, b_hi))
        c_r = sum(x * y for x, y in zip(a_hi, b_lo))
        l_pts, l_sc, r_pts, r_sc = [Q], [c_l], [Q], [c_r]
        for i in range(n):
            j = i % m
            if j >= half:
                l_pts += [G[i]]
                l_sc += [a_lo[j - half] * cg[i]]
                r_pts += [H[i]]
                r_sc += [b_lo[j - half] * ch[i]]
            else:
                l_pts += [H[i]]
                l_sc += [b_hi[j] * ch[i]]
                r_pts += [G[i]]
                r_sc += [a_hi[j] * cg[i]]
        L = multiexp(l_pts, l_sc)
        R = multiexp(r_pts, r_sc)
        Ls.append(L)
        Rs.append(R)
        t.absorb_point(b"ipa-L", L)
        t.absorb_point(b"ipa-R", R)
        x = int(t.challenge_scalar(b"ipa-x"))
        xi = pow(x, -1, ORDER)
        a = [(lo * x + hi * xi) % ORDER for lo, hi in zip(a_lo, a_hi)]
        b = [(lo * xi + hi * x) % ORDER for lo, hi in zip(b_lo, b_hi)]
        for i in range(n):
            if i % m < half:
                cg[i] = cg[i] * xi % ORDER
                ch[i] = ch[i] * x % ORDER
            else:
                cg[i] = cg[i] * x % ORDER
                ch[i] = ch[i] * xi % ORDER
        m = half
    return IpaProof(tuple(Ls), tuple(Rs), Scalar(a[0]), Scalar(b[0]))


def _fold_coefficients(challenges: Sequence[Scalar], n: int) -> list[Scalar]:
    """s_i = prod_k x_k^(+1 if bit k of i (MSB first) is set else -1)."""
    out = [Scalar(1)]
    for x in challenges:
        xi = x.invert()
        out = [v * f for v in out for f in (xi, x)]
    return out[:n]


def ipa_verify(G: Sequence[Point], H: Sequence[Point], Q: Point, P: Point, proof: IpaProof, t: Transcript,
               h_scale: Sequence[Scalar] | None = None) -> bool:
    """Check ``proof`` for ``P``. With ``h_scale`` the H-basis is taken to be
    ``h_scale[i] * H[i]`` without materializing it."""
    n = len(G)
    if len(H) != n or not is_power_of_two(n):
        return False
    k = log2(n)
    if len(proof.L) != k or len(proof.R) != k:
        return False
    t.absorb_int(b"ipa-n", n)
    xs = []
    for L, R in zip(proof.L, proof.R):
        t.absorb_point(b"ipa-L", L)
        t.absorb_point(b"ipa-R", R)
        xs.append(t.challenge_scalar(b"ipa-x"))
    s = _fold_coefficients(xs, n)
    # flipping every bit inverts the product, so 1/s_i = s_{n-1-i}
    s_inv = s[::-1]
    a, b = proof.a, proof.b
    g_coef = [a * si for si in s]
    h_coef = [b * si for si in s_inv]
    if h_scale is not None:
        h_coef = [c * y for c, y in zip(h_coef, h_scale)]
    pts = list(G) + list(H) + [Q, P]
    scs = g_coef + h_coef + [a * b, Scalar(-1)]
    for x, L, R in zip(xs, proof.L, proof.R):
        x2 = x * x
        pts += [L, R]
        scs += [-x2, -x2.invert()]
    return multiexp(pts, scs).is_identity()
