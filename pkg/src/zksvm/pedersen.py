"""Pedersen scalar and vector commitments.

Opened commitments (point plus message and blinding) exist only on the
prover side. Anything sent to a verifier is the bare :class:`Point`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from zksvm.errors import InvalidParameter
from zksvm.group import CommitParams, Point, Scalar, multiexp


@dataclass(frozen=True)
class ScalarCommitment:
    point: Point
    m: Scalar
    r: Scalar

    def __add__(self, other: "ScalarCommitment") -> "ScalarCommitment":
        return ScalarCommitment(self.point + other.point, self.m + other.m, self.r + other.r)

    def __sub__(self, other: "ScalarCommitment") -> "ScalarCommitment":
        return ScalarCommitment(self.point - other.point, self.m - other.m, self.r - other.r)

    def scale(self, k) -> "ScalarCommitment":
        return ScalarCommitment(self.point * k, self.m * k, self.r * k)


@dataclass(frozen=True)
class VectorCommitment:
    point: Point
    basis: tuple[Point, ...]
    mvec: tuple[Scalar, ...]
    r: Scalar

    def __add__(self, other: "VectorCommitment") -> "VectorCommitment":
        return VectorCommitment(
            self.point + other.point,
            self.basis,
            tuple(a + b for a, b in zip(self.mvec, other.mvec)),
            self.r + other.r,
        )

    def __sub__(self, other: "VectorCommitment") -> "VectorCommitment":
        """Point division in multiplicative notation; the message is the
        entry-wise difference over ``self.basis``. Only meaningful when both
        sides share a basis, or the caller relabels the message afterwards."""
        return VectorCommitment(
            self.point - other.point,
            self.basis,
            tuple(a - b for a, b in zip(self.mvec, other.mvec)),
            self.r - other.r,
        )


def _basis(params: CommitParams, basis) -> tuple[Point, ...]:
    if isinstance(basis, str):
        return params.basis(basis)
    return tuple(basis)


def commit_scalar(params: CommitParams, m, r) -> ScalarCommitment:
    m, r = Scalar(int(m)), Scalar(int(r))
    return ScalarCommitment(multiexp([params.g, params.h], [m, r]), m, r)


def commit_vector(params: CommitParams, basis, mvec: Sequence, r) -> VectorCommitment:
    bases = _basis(params, basis)
    if len(mvec) != len(bases):
        raise InvalidParameter(f"message length {len(mvec)} does not match basis length {len(bases)}")
    mvec = tuple(Scalar(int(m)) for m in mvec)
    r = Scalar(int(r))
    point = multiexp([*bases, params.h], [*mvec, r])
    return VectorCommitment(point, bases, mvec, r)


def open_check(params: CommitParams, commitment: Point, message, r, basis=None) -> bool:
    """Return True iff ``commitment`` opens to ``(message, r)``.

    A scalar ``message`` is checked against ``g``; a sequence against
    ``basis`` (default ``gvec``).
    """
    if isinstance(commitment, (ScalarCommitment, VectorCommitment)):
        commitment = commitment.point
    if isinstance(message, (int, Scalar)):
        bases, msg = [params.g], [message]
    else:
        bases = list(_basis(params, basis if basis is not None else "g"))
        msg = list(message)
        if len(msg) != len(bases):
            return False
    return multiexp([*bases, params.h], [*msg, r]) == commitment
