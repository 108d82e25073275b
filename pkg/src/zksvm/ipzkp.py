"""Zero-knowledge inner-product proof.

Statement: ``A = alpha*h + <a, gvec> + <b, hvec>`` and ``V = c*g + gamma*h``
with ``<a, b> = c``. The prover blinds both vectors, commits to the linear
and quadratic coefficients of ``t(X) = <a + sL*X, b + sR*X>``, and answers a
challenge ``C`` with ``l = a + sL*C``, ``r = b + sR*C``.

The linear variant sends ``l`` and ``r``. The log variant instead proves
``P - mu*h + t_hat*Q = <l, gvec> + <r, hvec> + <l, r>*Q`` with the
recursive argument in :mod:`zksvm.ipa`, where ``Q = x*u`` for a fresh
challenge ``x`` and ``u`` an auxiliary generator.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from zksvm.elements import ByteReader, ElementReader, ProofElements
from zksvm.errors import DecodeError, InvalidParameter, PreconditionError
from zksvm.group import CommitParams, Point, Scalar, aux_bases, inner_product, multiexp
from zksvm.ipa import IpaProof, ipa_prove, ipa_verify, is_power_of_two, log2
from zksvm.transcript import Transcript

LINEAR = "linear"
LOG = "log"
_VARIANT_BYTE = {LINEAR: 0, LOG: 1}


@dataclass(frozen=True)
class IpStatement:
    A: Point
    V: Point
    params: CommitParams


@dataclass(frozen=True)
class IpWitness:
    a: tuple[Scalar, ...]
    b: tuple[Scalar, ...]
    alpha: Scalar
    gamma: Scalar
    c: Scalar

    @classmethod
    def of(cls, a, b, alpha, gamma, c=None) -> "IpWitness":
        a = tuple(Scalar(int(x)) for x in a)
        b = tuple(Scalar(int(x)) for x in b)
        c = inner_product(a, b) if c is None else Scalar(int(c))
        return cls(a, b, Scalar(int(alpha)), Scalar(int(gamma)), c)


def statement_for(params: CommitParams, wit: IpWitness) -> IpStatement:
    A = multiexp([params.h, *params.gvec, *params.hvec], [wit.alpha, *wit.a, *wit.b])
    V = multiexp([params.g, params.h], [wit.c, wit.gamma])
    return IpStatement(A, V, params)


@dataclass(frozen=True)
class IpProof(ProofElements):
    variant: str
    S: Point
    T1: Point
    T2: Point
    tau: Scalar
    mu: Scalar
    t_hat: Scalar
    l: tuple[Scalar, ...] = ()
    r: tuple[Scalar, ...] = ()
    ipa: IpaProof | None = None

    @property
    def n(self) -> int:
        return len(self.l) if self.variant == LINEAR else 1 << len(self.ipa.L)

    def elements(self):
        pts = [self.S, self.T1, self.T2]
        scs = [self.tau, self.mu, self.t_hat]
        if self.variant == LINEAR:
            scs += list(self.l) + list(self.r)
        else:
            ipts, iscs = self.ipa.elements()
            pts += ipts
            scs += iscs
        return pts, scs

    @classmethod
    def read(cls, reader: ElementReader, variant: str, n: int):
        S, T1, T2 = reader.points(3)
        tau, mu, t_hat = reader.scalars(3)
        if variant == LINEAR:
            return cls(variant, S, T1, T2, tau, mu, t_hat, tuple(reader.scalars(n)), tuple(reader.scalars(n)))
        if variant == LOG:
            return cls(variant, S, T1, T2, tau, mu, t_hat, ipa=IpaProof.read(reader, n=n))
        raise InvalidParameter(f"unknown variant {variant!r}")

    def encode(self) -> bytes:
        pts, scs = self.elements()
        head = struct.pack("<BI", _VARIANT_BYTE[self.variant], self.n)
        return head + b"".join(p.encode() for p in pts) + b"".join(s.encode() for s in scs)

    @classmethod
    def decode(cls, data: bytes) -> "IpProof":
        r = ByteReader(data)
        vb, n = r.u8(), r.u32()
        variant = {v: k for k, v in _VARIANT_BYTE.items()}.get(vb)
        if variant is None:
            raise DecodeError(f"unknown variant byte {vb}")
        if n < 1 or n > 1 << 16 or (variant == LOG and not is_power_of_two(n)):
            raise DecodeError(f"bad vector length {n}")
        n_p, n_s = ip_proof_counts(variant, n)
        proof = cls.from_elements(r.points(n_p), r.scalars(n_s), variant=variant, n=n)
        r.finish()
        return proof


def ip_proof_counts(variant: str, n: int) -> tuple[int, int]:
    """(points, scalars) in an IpProof: linear 3 / 3+2n, log 3+2*log2(n) / 5."""
    if variant == LINEAR:
        return 3, 3 + 2 * n
    return 3 + 2 * log2(n), 5


def ipa_u(params: CommitParams) -> Point:
    return aux_bases(params.label, b"ipa-u", 1)[0]


def _absorb_statement(stmt: IpStatement, variant: str, t: Transcript) -> None:
    t.absorb(b"ip-zkp", variant.encode())
    t.absorb_int(b"n", stmt.params.n)
    t.absorb_point(b"A", stmt.A)
    t.absorb_point(b"V", stmt.V)


class IpProverSession:
    """The prover's two moves, separated so challenges can be injected.

    ``first_message()`` gives ``(S, T1, T2)``; ``respond(C)`` gives
    ``(l, r, t_hat, tau_C, mu)``.
    """

    def __init__(self, stmt: IpStatement, wit: IpWitness, rng=None):
        params = stmt.params
        n = params.n
        if len(wit.a) != n or len(wit.b) != n:
            raise InvalidParameter(f"witness length does not match n={n}")
        if inner_product(wit.a, wit.b) != wit.c:
            raise PreconditionError("<a, b> != c")
        expected = statement_for(params, wit)
        if expected.A != stmt.A or expected.V != stmt.V:
            raise PreconditionError("witness does not open the statement commitments")
        self.stmt, self.wit = stmt, wit
        self.sL = [Scalar.random(rng) for _ in range(n)]
        self.sR = [Scalar.random(rng) for _ in range(n)]
        self.rho = Scalar.random(rng)
        self.tau1 = Scalar.random(rng)
        self.tau2 = Scalar.random(rng)
        self.t1 = inner_product(wit.a, self.sR) + inner_product(self.sL, wit.b)
        self.t2 = inner_product(self.sL, self.sR)
        self.S = multiexp([params.h, *params.gvec, *params.hvec], [self.rho, *self.sL, *self.sR])
        self.T1 = multiexp([params.g, params.h], [self.t1, self.tau1])
        self.T2 = multiexp([params.g, params.h], [self.t2, self.tau2])

    def first_message(self) -> tuple[Point, Point, Point]:
        return self.S, self.T1, self.T2

    def respond(self, C: Scalar):
        w = self.wit
        l = [a + s * C for a, s in zip(w.a, self.sL)]
        r = [b + s * C for b, s in zip(w.b, self.sR)]
        t_hat = inner_product(l, r)
        tau = self.tau2 * C * C + self.tau1 * C + w.gamma
        mu = w.alpha + self.rho * C
        return l, r, t_hat, tau, mu


def ip_prove(stmt: IpStatement, wit: IpWitness, variant: str, t: Transcript, rng=None) -> IpProof:
    if variant not in _VARIANT_BYTE:
        raise InvalidParameter(f"unknown variant {variant!r}")
    n = stmt.params.n
    if variant == LOG and not is_power_of_two(n):
        raise InvalidParameter(f"log variant needs a power-of-two length, got {n}")
    session = IpProverSession(stmt, wit, rng)
    _absorb_statement(stmt, variant, t)
    S, T1, T2 = session.first_message()
    t.absorb_points(b"S-T1-T2", [S, T1, T2])
    C = t.challenge_scalar(b"ip-C")
    l, r, t_hat, tau, mu = session.respond(C)
    if variant == LINEAR:
        return IpProof(LINEAR, S, T1, T2, tau, mu, t_hat, tuple(l), tuple(r))
    params = stmt.params
    t.absorb_scalar(b"tau", tau)
    t.absorb_scalar(b"mu", mu)
    t.absorb_scalar(b"t_hat", t_hat)
    Q = ipa_u(params) * t.challenge_scalar(b"ip-x")
    ipa = ipa_prove(params.gvec, params.hvec, Q, l, r, t)
    return IpProof(LOG, S, T1, T2, tau, mu, t_hat, ipa=ipa)


def check_polynomial_commitments(stmt: IpStatement, T1: Point, T2: Point, C: Scalar, t_hat: Scalar,
                                 tau: Scalar) -> bool:
    """``t_hat*g + tau*h == V + C*T1 + C^2*T2``."""
    p = stmt.params
    return multiexp([p.g, p.h, stmt.V, T1, T2], [t_hat, tau, Scalar(-1), -C, -(C * C)]).is_identity()


def check_ip_equations(stmt: IpStatement, S: Point, T1: Point, T2: Point, C: Scalar, l: Sequence[Scalar],
                       r: Sequence[Scalar], t_hat: Scalar, tau: Scalar, mu: Scalar) -> bool:
    """All four verifier checks of the linear protocol, for an explicit ``C``."""
    p = stmt.params
    if len(l) != p.n or len(r) != p.n:
        return False
    if not check_polynomial_commitments(stmt, T1, T2, C, t_hat, tau):
        return False
    # P = A + C*S must equal mu*h + <l, gvec> + <r, hvec>
    lhs = multiexp([stmt.A, S, p.h, *p.gvec, *p.hvec], [Scalar(1), C, -mu, *(-x for x in l), *(-x for x in r)])
    if not lhs.is_identity():
        return False
    return t_hat == inner_product(l, r)


def ip_verify(stmt: IpStatement, proof: IpProof, t: Transcript) -> bool:
    p = stmt.params
    n = p.n
    if proof.variant not in _VARIANT_BYTE:
        return False
    if proof.variant == LOG and (proof.ipa is None or not is_power_of_two(n)):
        return False
    _absorb_statement(stmt, proof.variant, t)
    t.absorb_points(b"S-T1-T2", [proof.S, proof.T1, proof.T2])
    C = t.challenge_scalar(b"ip-C")
    if proof.variant == LINEAR:
        return check_ip_equations(stmt, proof.S, proof.T1, proof.T2, C, proof.l, proof.r,
                                  proof.t_hat, proof.tau, proof.mu)
    if len(proof.ipa.L) != log2(n):
        return False
    if not check_polynomial_commitments(stmt, proof.T1, proof.T2, C, proof.t_hat, proof.tau):
        return False
    t.absorb_scalar(b"tau", proof.tau)
    t.absorb_scalar(b"mu", proof.mu)
    t.absorb_scalar(b"t_hat", proof.t_hat)
    Q = ipa_u(p) * t.challenge_scalar(b"ip-x")
    P = multiexp([stmt.A, proof.S, p.h, Q], [Scalar(1), C, -proof.mu, proof.t_hat])
    return ipa_verify(p.gvec, p.hvec, Q, P, proof.ipa, t)


def ip_simulate(stmt: IpStatement, rng=None, challenge: Scalar | None = None) -> tuple[IpProof, Scalar]:
    """Accepting linear-variant transcript without a witness.

    Picks ``C, l, r, t_hat, tau, mu, T2`` at random and solves the
    verification equations for ``T1`` and ``S``. Returns the proof and the
    challenge it is valid for; check it with :func:`check_ip_equations`.
    """
    p = stmt.params
    n = p.n
    C = challenge if challenge is not None else Scalar.random_nonzero(rng)
    if not C:
        C = Scalar.random_nonzero(rng)
    l = [Scalar.random(rng) for _ in range(n)]
    r = [Scalar.random(rng) for _ in range(n)]
    # the last check forces t_hat = <l, r>; everything else is free
    t_hat = inner_product(l, r)
    tau, mu = Scalar.random(rng), Scalar.random(rng)
    T2 = p.g * Scalar.random(rng)
    T2 = T2 + p.h * Scalar.random(rng)
    c_inv = C.invert()
    T1 = multiexp([p.g, p.h, stmt.V, T2], [t_hat, tau, Scalar(-1), -(C * C)]) * c_inv
    S = multiexp([p.h, *p.gvec, *p.hvec, stmt.A], [mu, *l, *r, Scalar(-1)]) * c_inv
    return IpProof(LINEAR, S, T1, T2, tau, mu, t_hat, tuple(l), tuple(r)), C


@dataclass(frozen=True)
class ExtractedWitness:
    a: tuple[Scalar, ...]
    b: tuple[Scalar, ...]
    alpha: Scalar
    rho: Scalar
    sL: tuple[Scalar, ...]
    sR: tuple[Scalar, ...]
    gamma: Scalar
    c: Scalar


def _solve_quadratic_coefficients(cs: Sequence[Scalar], ys: Sequence[Scalar]) -> tuple[Scalar, Scalar, Scalar]:
    """Coefficients (k0, k1, k2) of k0 + k1*X + k2*X^2 through three points."""
    (x0, x1, x2), (y0, y1, y2) = cs, ys
    # Lagrange interpolation, collecting monomials
    k0 = k1 = k2 = Scalar(0)
    for xi, yi, xj, xk in ((x0, y0, x1, x2), (x1, y1, x0, x2), (x2, y2, x0, x1)):
        w = yi / ((xi - xj) * (xi - xk))
        k2 = k2 + w
        k1 = k1 - w * (xj + xk)
        k0 = k0 + w * xj * xk
    return k0, k1, k2


def ip_extract(stmt: IpStatement, first_message: tuple[Point, Point, Point], responses) -> ExtractedWitness:
    """Recover the witness from three accepting transcripts sharing
    ``(S, T1, T2)``; ``responses`` holds ``(C, l, r, t_hat, tau, mu)`` triples.

    Two transcripts give ``S``'s opening from ``A + C*S = mu*h + <l,g> + <r,h>``
    by differencing; substituting back gives ``A``'s. The third pins down the
    quadratic ``t(X)`` and ``tau(X)``, whose constant terms are ``c`` and
    ``gamma``.
    """
    if len(responses) != 3:
        raise InvalidParameter("extraction needs exactly three transcripts")
    cs = [Scalar(int(resp[0])) for resp in responses]
    if len({c.value for c in cs}) != 3:
        raise InvalidParameter("extraction needs three distinct challenges")
    S, T1, T2 = first_message
    for C, l, r, t_hat, tau, mu in responses:
        if not check_ip_equations(stmt, S, T1, T2, C, l, r, t_hat, tau, mu):
            raise InvalidParameter("transcript does not verify")
    (c1, l1, r1, _, _, mu1), (c2, l2, r2, _, _, mu2) = responses[0], responses[1]
    d_inv = (Scalar(int(c1)) - Scalar(int(c2))).invert()
    rho = (mu1 - mu2) * d_inv
    sL = tuple((x - y) * d_inv for x, y in zip(l1, l2))
    sR = tuple((x - y) * d_inv for x, y in zip(r1, r2))
    alpha = mu1 - rho * c1
    a = tuple(x - s * c1 for x, s in zip(l1, sL))
    b = tuple(x - s * c1 for x, s in zip(r1, sR))
    t0, _, _ = _solve_quadratic_coefficients(cs, [resp[3] for resp in responses])
    gamma, _, _ = _solve_quadratic_coefficients(cs, [resp[4] for resp in responses])
    return ExtractedWitness(a, b, alpha, rho, sL, sR, gamma, t0)
