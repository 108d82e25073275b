"""Range proofs (``0 <= m < 2^l``) and floor-square-root proofs.

The range proof is the single-value Bulletproofs construction: commit to the
bit vector, reduce the bit constraints to one inner product, and finish with
the halving argument of :mod:`zksvm.ipa` over ``l`` auxiliary generators.

The square-root proof shows ``m1 = isqrt(m2)`` for ``C1 = Commit(m1)`` and
``C2 = Commit(m2)`` through auxiliary commitments ``Sq1 = Commit(m1^2)`` and
``Sq2 = Commit((m1+1)^2)`` plus two range statements::

    m2 - m1^2            in [0, 2^l)      on  C2 - Sq1
    (m1+1)^2 - m2 - 1    in [0, 2^l)      on  Sq2 - C2 - g
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from math import isqrt

from zksvm.elements import ByteReader, ElementReader, ProofElements
from zksvm.errors import BoundError, DecodeError, InvalidParameter, PreconditionError
from zksvm.group import CommitParams, Point, Scalar, aux_bases, inner_product, multiexp
from zksvm.ipa import IpaProof, ipa_prove, ipa_verify, log2
from zksvm.sigma import SquareProof, prove_square, verify_square
from zksvm.transcript import Transcript

SUPPORTED_BITS = (8, 16, 32, 64)
DEFAULT_BITS = 64


def _check_bits(bits: int) -> None:
    if bits not in SUPPORTED_BITS:
        raise InvalidParameter(f"unsupported range bit length {bits}; use one of {SUPPORTED_BITS}")


def range_bases(params: CommitParams, bits: int) -> tuple[tuple[Point, ...], tuple[Point, ...], Point]:
    pts = aux_bases(params.label, b"range", 2 * bits + 1)
    return pts[:bits], pts[bits:2 * bits], pts[-1]


def _powers(x: Scalar, k: int) -> list[Scalar]:
    out, acc = [], Scalar(1)
    for _ in range(k):
        out.append(acc)
        acc = acc * x
    return out


@dataclass(frozen=True)
class RangeProof(ProofElements):
    bits: int
    A: Point
    S: Point
    T1: Point
    T2: Point
    tau_x: Scalar
    mu: Scalar
    t_hat: Scalar
    ipa: IpaProof

    def elements(self):
        ipts, iscs = self.ipa.elements()
        return [self.A, self.S, self.T1, self.T2, *ipts], [self.tau_x, self.mu, self.t_hat, *iscs]

    @classmethod
    def read(cls, reader: ElementReader, bits: int):
        A, S, T1, T2 = reader.points(4)
        tau_x, mu, t_hat = reader.scalars(3)
        return cls(bits, A, S, T1, T2, tau_x, mu, t_hat, IpaProof.read(reader, n=bits))

    def encode(self) -> bytes:
        pts, scs = self.elements()
        return b"".join(
            [struct.pack("<HI", self.bits, len(pts)), *(p.encode() for p in pts),
             struct.pack("<I", len(scs)), *(s.encode() for s in scs)]
        )

    @classmethod
    def decode(cls, data: bytes) -> "RangeProof":
        r = ByteReader(data)
        bits = r.u16()
        if bits not in SUPPORTED_BITS:
            raise DecodeError(f"unsupported range bit length {bits}")
        n_p, n_s = range_proof_counts(bits)
        if r.u32() != n_p:
            raise DecodeError("range proof point count does not match bit length")
        pts = r.points(n_p)
        if r.u32() != n_s:
            raise DecodeError("range proof scalar count does not match bit length")
        proof = cls.from_elements(pts, r.scalars(n_s), bits=bits)
        r.finish()
        return proof


def range_proof_counts(bits: int) -> tuple[int, int]:
    """(points, scalars): ``4 + 2*log2(bits)`` and 5."""
    return 4 + 2 * log2(bits), 5


def _absorb_range_statement(t: Transcript, bits: int, C: Point) -> None:
    t.absorb(b"range-proof", struct.pack("<H", bits))
    t.absorb_point(b"V", C)


def prove_range(params: CommitParams, C: Point, m: int, r, bits: int, t: Transcript, rng=None) -> RangeProof:
    _check_bits(bits)
    m = int(m)
    if not 0 <= m < 1 << bits:
        raise BoundError(f"value outside [0, 2^{bits})")
    r = Scalar(int(r))
    if multiexp([params.g, params.h], [m, r]) != C:
        raise PreconditionError("commitment does not open to the given value")
    G, H, u = range_bases(params, bits)
    g, h = params.g, params.h
    a_l = [Scalar((m >> i) & 1) for i in range(bits)]
    a_r = [x - 1 for x in a_l]
    alpha = Scalar.random(rng)
    A = multiexp([h, *G, *H], [alpha, *a_l, *a_r])
    s_l = [Scalar.random(rng) for _ in range(bits)]
    s_r = [Scalar.random(rng) for _ in range(bits)]
    rho = Scalar.random(rng)
    S = multiexp([h, *G, *H], [rho, *s_l, *s_r])

    _absorb_range_statement(t, bits, C)
    t.absorb_point(b"A", A)
    t.absorb_point(b"S", S)
    y = t.challenge_scalar(b"range-y")
    z = t.challenge_scalar(b"range-z")
    y_pows = _powers(y, bits)
    two_pows = [Scalar(1 << i) for i in range(bits)]
    z2 = z * z

    # l(X) = (a_l - z) + s_l X ;  r(X) = y^i (a_r + z + s_r X) + z^2 2^i
    l0 = [a - z for a in a_l]
    r0 = [yp * (a + z) + z2 * tp for yp, a, tp in zip(y_pows, a_r, two_pows)]
    r1 = [yp * s for yp, s in zip(y_pows, s_r)]
    t1 = inner_product(l0, r1) + inner_product(s_l, r0)
    t2 = inner_product(s_l, r1)
    tau1, tau2 = Scalar.random(rng), Scalar.random(rng)
    T1 = multiexp([g, h], [t1, tau1])
    T2 = multiexp([g, h], [t2, tau2])
    t.absorb_point(b"T1", T1)
    t.absorb_point(b"T2", T2)
    x = t.challenge_scalar(b"range-x")

    l_vec = [a + s * x for a, s in zip(l0, s_l)]
    r_vec = [a + s * x for a, s in zip(r0, r1)]
    t_hat = inner_product(l_vec, r_vec)
    tau_x = tau2 * x * x + tau1 * x + z2 * r
    mu = alpha + rho * x

    t.absorb_scalar(b"tau_x", tau_x)
    t.absorb_scalar(b"mu", mu)
    t.absorb_scalar(b"t_hat", t_hat)
    Q = u * t.challenge_scalar(b"range-w")
    y_inv = y.invert()
    H_prime = [hp * yi for hp, yi in zip(H, _powers(y_inv, bits))]
    ipa = ipa_prove(G, H_prime, Q, l_vec, r_vec, t)
    return RangeProof(bits, A, S, T1, T2, tau_x, mu, t_hat, ipa)


def verify_range(params: CommitParams, C: Point, proof: RangeProof, bits: int, t: Transcript) -> bool:
    if bits not in SUPPORTED_BITS or proof.bits != bits or len(proof.ipa.L) != log2(bits):
        return False
    G, H, u = range_bases(params, bits)
    g, h = params.g, params.h
    _absorb_range_statement(t, bits, C)
    t.absorb_point(b"A", proof.A)
    t.absorb_point(b"S", proof.S)
    y = t.challenge_scalar(b"range-y")
    z = t.challenge_scalar(b"range-z")
    t.absorb_point(b"T1", proof.T1)
    t.absorb_point(b"T2", proof.T2)
    x = t.challenge_scalar(b"range-x")

    y_pows = _powers(y, bits)
    z2 = z * z
    sum_y = sum((p.value for p in y_pows), 0)
    sum_2 = (1 << bits) - 1
    delta = (z - z2) * sum_y - z2 * z * sum_2
    check = multiexp(
        [g, h, C, g, proof.T1, proof.T2],
        [proof.t_hat, proof.tau_x, -z2, -delta, -x, -(x * x)],
    )
    if not check.is_identity():
        return False

    t.absorb_scalar(b"tau_x", proof.tau_x)
    t.absorb_scalar(b"mu", proof.mu)
    t.absorb_scalar(b"t_hat", proof.t_hat)
    Q = u * t.challenge_scalar(b"range-w")
    y_inv_pows = _powers(y.invert(), bits)
    # P against H' = y^-i H_i: the H' coefficient z*y^i + z^2*2^i becomes z + z^2 2^i y^-i on H
    h_coef = [z + z2 * Scalar(1 << i) * yi for i, yi in enumerate(y_inv_pows)]
    P = multiexp(
        [proof.A, proof.S, *G, *H, h, Q],
        [Scalar(1), x, *([-z] * bits), *h_coef, -proof.mu, proof.t_hat],
    )
    return ipa_verify(G, H, Q, P, proof.ipa, t, h_scale=y_inv_pows)


@dataclass(frozen=True)
class SqrtProof(ProofElements):
    bits: int
    sq_low: Point
    sq_high: Point
    square_low: SquareProof
    square_high: SquareProof
    range_low: RangeProof
    range_high: RangeProof

    def elements(self):
        pts, scs = [self.sq_low, self.sq_high], []
        for part in (self.square_low, self.square_high, self.range_low, self.range_high):
            p, s = part.elements()
            pts += p
            scs += s
        return pts, scs

    @classmethod
    def read(cls, reader: ElementReader, bits: int):
        sq_low, sq_high = reader.points(2)
        return cls(
            bits, sq_low, sq_high,
            SquareProof.read(reader, equations=2, witnesses=3),
            SquareProof.read(reader, equations=2, witnesses=3),
            RangeProof.read(reader, bits=bits),
            RangeProof.read(reader, bits=bits),
        )


def sqrt_proof_counts(bits: int) -> tuple[int, int]:
    rp, rs = range_proof_counts(bits)
    return 2 + 4 + 2 * rp, 6 + 2 * rs


def prove_sqrt(params: CommitParams, C1: Point, C2: Point, m1: int, m2: int, r1, r2, bits: int,
               t: Transcript, rng=None) -> SqrtProof:
    """Prove ``m1 = floor(sqrt(m2))`` for ``C1 = Commit(m1, r1)``, ``C2 = Commit(m2, r2)``."""
    _check_bits(bits)
    m1, m2 = int(m1), int(m2)
    r1, r2 = Scalar(int(r1)), Scalar(int(r2))
    if not 0 <= m2 < 1 << bits:
        raise BoundError(f"radicand outside [0, 2^{bits})")
    if m1 != isqrt(m2):
        raise PreconditionError(f"{m1} is not the integer square root of {m2}")
    g, h = params.g, params.h
    if multiexp([g, h], [m1, r1]) != C1 or multiexp([g, h], [m2, r2]) != C2:
        raise PreconditionError("commitments do not open to the given values")

    s_low, s_high = Scalar.random(rng), Scalar.random(rng)
    sq_low = multiexp([g, h], [m1 * m1, s_low])
    sq_high = multiexp([g, h], [(m1 + 1) ** 2, s_high])
    t.absorb(b"sqrt-proof", struct.pack("<H", bits))
    t.absorb_points(b"statement", [C1, C2, sq_low, sq_high])
    square_low = prove_square(params, sq_low, C1, m1, s_low, r1, t.fork(b"square-low"), rng)
    square_high = prove_square(params, sq_high, C1 + g, m1 + 1, s_high, r1, t.fork(b"square-high"), rng)
    range_low = prove_range(params, C2 - sq_low, m2 - m1 * m1, r2 - s_low, bits, t.fork(b"range-low"), rng)
    range_high = prove_range(params, sq_high - C2 - g, (m1 + 1) ** 2 - m2 - 1, s_high - r2, bits,
                             t.fork(b"range-high"), rng)
    return SqrtProof(bits, sq_low, sq_high, square_low, square_high, range_low, range_high)


def verify_sqrt(params: CommitParams, C1: Point, C2: Point, proof: SqrtProof, bits: int, t: Transcript) -> bool:
    if proof.bits != bits or bits not in SUPPORTED_BITS:
        return False
    g = params.g
    t.absorb(b"sqrt-proof", struct.pack("<H", bits))
    t.absorb_points(b"statement", [C1, C2, proof.sq_low, proof.sq_high])
    return (
        verify_square(params, proof.sq_low, C1, proof.square_low, t.fork(b"square-low"))
        and verify_square(params, proof.sq_high, C1 + g, proof.square_high, t.fork(b"square-high"))
        and verify_range(params, C2 - proof.sq_low, proof.range_low, bits, t.fork(b"range-low"))
        and verify_range(params, proof.sq_high - C2 - g, proof.range_high, bits, t.fork(b"range-high"))
    )
