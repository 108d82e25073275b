"""Prime-order group backbone.

The group is ristretto255 (via curve25519-dalek). Everything else in the
package only sees :class:`Scalar`, :class:`Point`, :class:`CommitParams` and
:func:`multiexp`, so swapping the backend is confined to this module.

Notation is additive: ``s * P`` is scalar multiplication, ``P + Q`` the group
law. A Pedersen commitment ``g^m h^r`` is therefore written ``m*g + r*h``.
"""
from __future__ import annotations

import hashlib
import secrets
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from zksvm import _ristretto
from zksvm.errors import InvalidParameter, NonCanonicalEncoding

#: Prime order of ristretto255.
ORDER = 2**252 + 27742317777372353535851937790883648493
SCALAR_BYTES = 32
POINT_BYTES = 32

_default_rng = secrets.SystemRandom()


def default_rng():
    return _default_rng


class Scalar:
    """Element of the scalar field Z_p."""

    __slots__ = ("value",)

    def __init__(self, value: int = 0):
        self.value = value % ORDER

    @classmethod
    def random(cls, rng=None) -> "Scalar":
        return cls((rng or _default_rng).randrange(ORDER))

    @classmethod
    def random_nonzero(cls, rng=None) -> "Scalar":
        rng = rng or _default_rng
        return cls(rng.randrange(1, ORDER))

    @classmethod
    def from_signed(cls, x: int) -> "Scalar":
        return cls(x)

    def to_signed(self) -> int:
        """Map back to a signed integer by centering at p/2."""
        return self.value - ORDER if self.value > ORDER // 2 else self.value

    def encode(self) -> bytes:
        return self.value.to_bytes(SCALAR_BYTES, "little")

    @classmethod
    def decode(cls, data: bytes) -> "Scalar":
        if len(data) != SCALAR_BYTES:
            raise NonCanonicalEncoding(f"scalar must be {SCALAR_BYTES} bytes, got {len(data)}")
        v = int.from_bytes(data, "little")
        if v >= ORDER:
            raise NonCanonicalEncoding("non-canonical scalar encoding")
        return cls(v)

    def invert(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return Scalar(pow(self.value, -1, ORDER))

    def __add__(self, other):
        return Scalar(self.value + _int(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.value - _int(other))

    def __rsub__(self, other):
        return Scalar(_int(other) - self.value)

    def __mul__(self, other):
        if isinstance(other, Point):
            return other * self
        return Scalar(self.value * _int(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * Scalar(_int(other)).invert()

    def __neg__(self):
        return Scalar(-self.value)

    def __pow__(self, e: int):
        return Scalar(pow(self.value, e, ORDER))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other % ORDER
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Scalar({self.to_signed()})"


def _int(x) -> int:
    if isinstance(x, Scalar):
        return x.value
    if isinstance(x, int):
        return x
    raise TypeError(f"expected Scalar or int, got {type(x).__name__}")


class Point:
    """Element of the ristretto255 group."""

    __slots__ = ("_raw", "_enc")

    def __init__(self, raw):
        self._raw = raw
        self._enc = None

    @classmethod
    def identity(cls) -> "Point":
        return cls(_ristretto.RawPoint.identity())

    @classmethod
    def basepoint(cls) -> "Point":
        return cls(_ristretto.RawPoint.basepoint())

    @classmethod
    def from_uniform_bytes(cls, data: bytes) -> "Point":
        return cls(_ristretto.RawPoint.from_uniform_bytes(data))

    @classmethod
    def hash_to_point(cls, *parts: bytes) -> "Point":
        h = hashlib.sha512()
        for part in parts:
            h.update(struct.pack("<I", len(part)))
            h.update(part)
        return cls.from_uniform_bytes(h.digest())

    def encode(self) -> bytes:
        if self._enc is None:
            self._enc = bytes(self._raw.encode())
        return self._enc

    @classmethod
    def decode(cls, data: bytes) -> "Point":
        try:
            return cls(_ristretto.RawPoint.decode(bytes(data)))
        except ValueError as exc:
            raise NonCanonicalEncoding(str(exc)) from None

    def is_identity(self) -> bool:
        return self._raw.is_identity()

    def __add__(self, other: "Point") -> "Point":
        return Point(self._raw.add(other._raw))

    def __sub__(self, other: "Point") -> "Point":
        return Point(self._raw.sub(other._raw))

    def __neg__(self) -> "Point":
        return Point(self._raw.neg())

    def __mul__(self, s) -> "Point":
        return Point(self._raw.mul((_int(s) % ORDER).to_bytes(32, "little")))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self._raw.equals(other._raw)

    def __hash__(self):
        return hash(self.encode())

    def __repr__(self):
        return f"Point({self.encode().hex()[:16]}...)"


def multiexp(points: Sequence[Point], scalars: Sequence) -> Point:
    """Return sum(scalars[i] * points[i])."""
    if len(points) != len(scalars):
        raise InvalidParameter(f"multiexp length mismatch: {len(points)} points, {len(scalars)} scalars")
    if not points:
        raise InvalidParameter("multiexp of an empty list")
    raw = _ristretto.multiscalar_mul(
        [(_int(s) % ORDER).to_bytes(32, "little") for s in scalars],
        [p._raw for p in points],
    )
    return Point(raw)


def point_sum(points: Iterable[Point]) -> Point:
    acc = _ristretto.RawPoint.identity()
    for p in points:
        acc = acc.add(p._raw)
    return Point(acc)


def inner_product(a: Sequence, b: Sequence) -> Scalar:
    if len(a) != len(b):
        raise InvalidParameter("inner product length mismatch")
    return Scalar(sum(_int(x) * _int(y) for x, y in zip(a, b)))


GENERATOR_DOMAIN = b"zksvm/generator/v1"


def derive_generator(label: bytes, index: int) -> Point:
    """Hash ``label || index`` to a group element.

    Uses SHA-512 into the ristretto255 uniform map, so no discrete-log
    relation between outputs is known to anyone.
    """
    return Point.hash_to_point(GENERATOR_DOMAIN, label, struct.pack("<Q", index))


@dataclass(frozen=True, eq=False)
class CommitParams:
    """Public generators ``g, h`` and the vector bases ``gvec, hvec``."""

    label: bytes
    g: Point
    h: Point
    gvec: tuple[Point, ...]
    hvec: tuple[Point, ...]
    _derived: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.gvec)

    @property
    def gvec_iter(self) -> tuple[Point, ...]:
        """gvec rotated by one: (g_n, g_1, ..., g_{n-1})."""
        return self._cached("g_iter", lambda: (self.gvec[-1],) + self.gvec[:-1])

    @property
    def g_prod(self) -> Point:
        return self._cached("g_prod", lambda: point_sum(self.gvec))

    @property
    def h_prod(self) -> Point:
        return self._cached("h_prod", lambda: point_sum(self.hvec))

    def basis(self, name: str) -> tuple[Point, ...]:
        """Look up a named vector basis: ``"g"``, ``"h"`` or ``"g_iter"``."""
        if name == "g":
            return self.gvec
        if name == "h":
            return self.hvec
        if name == "g_iter":
            return self.gvec_iter
        raise InvalidParameter(f"unknown basis {name!r}")

    def _cached(self, key, make):
        if key not in self._derived:
            self._derived[key] = make()
        return self._derived[key]

    def encode(self) -> bytes:
        return b"".join(p.encode() for p in (self.g, self.h, *self.gvec, *self.hvec))

    def __eq__(self, other):
        if not isinstance(other, CommitParams):
            return NotImplemented
        return self.label == other.label and self.encode() == other.encode()

    def __hash__(self):
        return hash((self.label, self.n))


@lru_cache(maxsize=32)
def derive_params(label: bytes | str, n: int) -> CommitParams:
    """Derive ``2n + 2`` generators from ``label``.

    Index 0 is ``g``, index 1 is ``h``, then ``gvec`` (2..n+1), then ``hvec``.
    """
    if isinstance(label, str):
        label = label.encode()
    if not label:
        raise InvalidParameter("label must be non-empty")
    if n < 1:
        raise InvalidParameter(f"vector length must be positive, got {n}")
    pts = [derive_generator(label, i) for i in range(2 * n + 2)]
    return CommitParams(
        label=label, g=pts[0], h=pts[1], gvec=tuple(pts[2:n + 2]), hvec=tuple(pts[n + 2:])
    )


@lru_cache(maxsize=64)
def aux_bases(label: bytes, tag: bytes, count: int) -> tuple[Point, ...]:
    """Auxiliary generators (range-proof vectors, inner-product ``u``) kept
    in a namespace disjoint from :func:`derive_params`."""
    return tuple(derive_generator(label + b"/" + tag, i) for i in range(count))
