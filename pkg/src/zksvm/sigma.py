"""Sigma protocols over Pedersen commitments.

All four proofs are instances of one engine: a :class:`Relation` is a list of
equations ``target_e = sum_k base_{e,k} * w[idx_{e,k}]`` over a shared
witness vector ``w``. The prover sends one announcement per equation and one
response per witness; shared witnesses are what tie the equations together.

* opening      ``C = <m, basis> + r*h``
* equality     ``C1 = <m, basis1> + r1*h``  and  ``C2 = <m, basis2> + r2*h``
* zero-replace ``E = m_j*b_j``, ``C - E = sum_{i!=j} m_i*b_i + r*h``,
  ``Diff = sum_{i!=j} m_i*b_i + r_new*h``
* square       ``C2 = m2*g + r2*h``  and  ``C1 = m2*C2 + (r1 - m2*r2)*h``
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from zksvm.elements import ElementReader, ProofElements, ByteReader, encode_counted, read_counted
from zksvm.errors import InvalidParameter, PreconditionError
from zksvm.group import CommitParams, Point, Scalar, multiexp
from zksvm.pedersen import VectorCommitment, commit_vector
from zksvm.transcript import Transcript


@dataclass(frozen=True)
class Relation:
    label: bytes
    targets: tuple[Point, ...]
    terms: tuple[tuple[tuple[Point, int], ...], ...]
    n_witnesses: int

    def absorb(self, t: Transcript) -> None:
        t.absorb(b"sigma-relation", self.label)
        t.absorb_int(b"witnesses", self.n_witnesses)
        for target, eq in zip(self.targets, self.terms):
            t.absorb_point(b"target", target)
            t.absorb_points(b"bases", [b for b, _ in eq])
            t.absorb(b"indices", struct.pack(f"<{len(eq)}I", *[i for _, i in eq]))

    def evaluate(self, eq: int, w: Sequence[Scalar]) -> Point:
        bases, idx = zip(*self.terms[eq])
        return multiexp(list(bases), [w[i] for i in idx])

    def holds(self, w: Sequence[Scalar]) -> bool:
        return len(w) == self.n_witnesses and all(
            self.evaluate(e, w) == target for e, target in enumerate(self.targets)
        )


@dataclass(frozen=True)
class SigmaProof(ProofElements):
    announcements: tuple[Point, ...]
    responses: tuple[Scalar, ...]

    def elements(self):
        return list(self.announcements), list(self.responses)

    @classmethod
    def read(cls, reader: ElementReader, equations: int, witnesses: int):
        return cls(tuple(reader.points(equations)), tuple(reader.scalars(witnesses)))

    def encode(self) -> bytes:
        return encode_counted(self.announcements, self.responses)

    @classmethod
    def decode(cls, data: bytes):
        r = ByteReader(data)
        pts, scs = read_counted(r)
        r.finish()
        return cls(tuple(pts), tuple(scs))


class OpeningProof(SigmaProof):
    pass


class EqualityProof(SigmaProof):
    pass


class SquareProof(SigmaProof):
    pass


def sigma_prove(rel: Relation, witness: Sequence[Scalar], t: Transcript, rng=None, cls=SigmaProof):
    witness = [Scalar(int(w)) for w in witness]
    if not rel.holds(witness):
        raise PreconditionError(f"witness does not satisfy {rel.label.decode()} relation")
    nonces = [Scalar.random(rng) for _ in range(rel.n_witnesses)]
    anns = tuple(rel.evaluate(e, nonces) for e in range(len(rel.targets)))
    rel.absorb(t)
    t.absorb_points(b"announcements", anns)
    c = t.challenge_scalar(b"sigma-challenge")
    return cls(anns, tuple(k + c * w for k, w in zip(nonces, witness)))


def sigma_check(rel: Relation, proof: SigmaProof, c: Scalar) -> bool:
    """The verification equations for an explicit challenge."""
    if len(proof.announcements) != len(rel.targets) or len(proof.responses) != rel.n_witnesses:
        return False
    for e, (target, eq) in enumerate(zip(rel.targets, rel.terms)):
        bases = [b for b, _ in eq]
        zs = [proof.responses[i] for _, i in eq]
        lhs = multiexp(bases + [target, proof.announcements[e]], zs + [-c, Scalar(-1)])
        if not lhs.is_identity():
            return False
    return True


def sigma_verify(rel: Relation, proof: SigmaProof, t: Transcript) -> bool:
    if len(proof.announcements) != len(rel.targets):
        return False
    rel.absorb(t)
    t.absorb_points(b"announcements", proof.announcements)
    c = t.challenge_scalar(b"sigma-challenge")
    return sigma_check(rel, proof, c)


def sigma_simulate(rel: Relation, c: Scalar, rng=None, cls=SigmaProof):
    """Accepting transcript for challenge ``c`` without a witness."""
    z = [Scalar.random(rng) for _ in range(rel.n_witnesses)]
    anns = []
    for e, target in enumerate(rel.targets):
        anns.append(rel.evaluate(e, z) - target * c)
    return cls(tuple(anns), tuple(z))


def _bases(params: CommitParams, basis) -> tuple[Point, ...]:
    if isinstance(basis, str):
        return params.basis(basis)
    return tuple(basis)


def opening_relation(params, basis, C: Point) -> Relation:
    b = _bases(params, basis)
    n = len(b)
    terms = tuple((b[i], i) for i in range(n)) + ((params.h, n),)
    return Relation(b"opening", (C,), (terms,), n + 1)


def equality_relation(params, basis1, basis2, C1: Point, C2: Point) -> Relation:
    b1, b2 = _bases(params, basis1), _bases(params, basis2)
    if len(b1) != len(b2):
        raise InvalidParameter("equality bases differ in length")
    n = len(b1)
    eq1 = tuple((b1[i], i) for i in range(n)) + ((params.h, n),)
    eq2 = tuple((b2[i], i) for i in range(n)) + ((params.h, n + 1),)
    return Relation(b"equality", (C1, C2), (eq1, eq2), n + 2)


def zero_replace_relation(params, basis, C: Point, E: Point, diff: Point, j: int) -> Relation:
    b = _bases(params, basis)
    n = len(b)
    if not 1 <= j <= n:
        raise InvalidParameter(f"position {j} outside 1..{n}")
    k = j - 1
    rest = tuple((b[i], i) for i in range(n) if i != k)
    return Relation(
        b"zero-replace" + struct.pack("<I", j),
        (E, C - E, diff),
        (((b[k], k),), rest + ((params.h, n),), rest + ((params.h, n + 1),)),
        n + 2,
    )


def square_relation(params, C1: Point, C2: Point) -> Relation:
    return Relation(
        b"square",
        (C2, C1),
        (((params.g, 0), (params.h, 1)), ((C2, 0), (params.h, 2))),
        3,
    )


def prove_opening(params, basis, C: Point, mvec, r, t: Transcript, rng=None) -> OpeningProof:
    return sigma_prove(opening_relation(params, basis, C), [*mvec, r], t, rng, OpeningProof)


def verify_opening(params, basis, C: Point, proof: SigmaProof, t: Transcript) -> bool:
    return sigma_verify(opening_relation(params, basis, C), proof, t)


def prove_equality(params, basis1, basis2, C1: Point, C2: Point, mvec, r1, r2, t, rng=None) -> EqualityProof:
    rel = equality_relation(params, basis1, basis2, C1, C2)
    return sigma_prove(rel, [*mvec, r1, r2], t, rng, EqualityProof)


def verify_equality(params, basis1, basis2, C1: Point, C2: Point, proof: SigmaProof, t: Transcript) -> bool:
    try:
        rel = equality_relation(params, basis1, basis2, C1, C2)
    except InvalidParameter:
        return False
    return sigma_verify(rel, proof, t)


@dataclass(frozen=True)
class ZeroReplaceProof(ProofElements):
    E: Point
    proof: SigmaProof

    def elements(self):
        pts, scs = self.proof.elements()
        return [self.E, *pts], scs

    @classmethod
    def read(cls, reader: ElementReader, n: int):
        E = reader.point()
        return cls(E, SigmaProof.read(reader, equations=3, witnesses=n + 2))

    def encode(self) -> bytes:
        pts, scs = self.elements()
        return encode_counted(pts, scs)


def prove_zero_replace(params, C: Point, mvec, r, j: int, r_new, t: Transcript, rng=None, basis="g"):
    """Replace entry ``j`` (1-based) of the message under ``C`` by zero.

    Returns the re-randomized commitment ``Diff`` and the proof tying ``C``,
    ``E = m_j * b_j`` and ``Diff`` together.
    """
    b = _bases(params, basis)
    if not 1 <= j <= len(b):
        raise InvalidParameter(f"position {j} outside 1..{len(b)}")
    mvec = [Scalar(int(m)) for m in mvec]
    zeroed = list(mvec)
    zeroed[j - 1] = Scalar(0)
    diff = commit_vector(params, b, zeroed, r_new)
    E = b[j - 1] * mvec[j - 1]
    rel = zero_replace_relation(params, b, C, E, diff.point, j)
    proof = sigma_prove(rel, [*mvec, r, r_new], t, rng)
    return diff, ZeroReplaceProof(E, proof)


def verify_zero_replace(params, C: Point, diff: Point, j: int, proof: ZeroReplaceProof, t: Transcript,
                        basis="g") -> bool:
    try:
        rel = zero_replace_relation(params, basis, C, proof.E, diff, j)
    except InvalidParameter:
        return False
    return sigma_verify(rel, proof.proof, t)


def prove_square(params, C1: Point, C2: Point, m2, r1, r2, t: Transcript, rng=None) -> SquareProof:
    """Prove ``C1`` commits to the square of the value under ``C2``.

    ``r1`` is the blinding of ``C1``; the prover checks ``C1 = m2^2*g + r1*h``.
    """
    m2, r1, r2 = Scalar(int(m2)), Scalar(int(r1)), Scalar(int(r2))
    if multiexp([params.g, params.h], [m2 * m2, r1]) != C1:
        raise PreconditionError("first commitment does not open to the square")
    rel = square_relation(params, C1, C2)
    return sigma_prove(rel, [m2, r2, r1 - m2 * r2], t, rng, SquareProof)


def verify_square(params, C1: Point, C2: Point, proof: SigmaProof, t: Transcript) -> bool:
    return sigma_verify(square_relation(params, C1, C2), proof, t)


def commit_iterated(params: CommitParams, mvec, r) -> VectorCommitment:
    return commit_vector(params, "g_iter", mvec, r)
