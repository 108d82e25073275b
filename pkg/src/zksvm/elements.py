"""Flat (points, scalars) views of proof objects.

Every proof type lists its group elements and scalars in one fixed order.
That order is the wire order, and it is also what the mutation tests walk
when they tamper with "every serialized field".
"""
from __future__ import annotations

import struct
from typing import Iterator, Sequence

from zksvm.errors import DecodeError, TruncatedInput
from zksvm.group import POINT_BYTES, SCALAR_BYTES, Point, Scalar


class ElementReader:
    def __init__(self, points: Sequence[Point], scalars: Sequence[Scalar]):
        self._points = list(points)
        self._scalars = list(scalars)
        self._pi = 0
        self._si = 0

    def point(self) -> Point:
        if self._pi >= len(self._points):
            raise DecodeError("ran out of points")
        self._pi += 1
        return self._points[self._pi - 1]

    def points(self, k: int) -> list[Point]:
        return [self.point() for _ in range(k)]

    def scalar(self) -> Scalar:
        if self._si >= len(self._scalars):
            raise DecodeError("ran out of scalars")
        self._si += 1
        return self._scalars[self._si - 1]

    def scalars(self, k: int) -> list[Scalar]:
        return [self.scalar() for _ in range(k)]

    def finish(self) -> None:
        if self._pi != len(self._points) or self._si != len(self._scalars):
            raise DecodeError("trailing elements after proof body")


class ByteReader:
    def __init__(self, data: bytes):
        self.data = memoryview(bytes(data))
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise TruncatedInput(f"truncated input: need {k} bytes at offset {self.pos}, have {len(self.data) - self.pos}")
        out = bytes(self.data[self.pos:self.pos + k])
        self.pos += k
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def blob(self) -> bytes:
        return self.take(self.u32())

    def points(self, k: int) -> list[Point]:
        return [Point.decode(self.take(POINT_BYTES)) for _ in range(k)]

    def scalars(self, k: int) -> list[Scalar]:
        return [Scalar.decode(self.take(SCALAR_BYTES)) for _ in range(k)]

    def remaining(self) -> int:
        return len(self.data) - self.pos

    def finish(self) -> None:
        if self.remaining():
            raise DecodeError(f"{self.remaining()} trailing bytes")


def encode_counted(points: Sequence[Point], scalars: Sequence[Scalar]) -> bytes:
    """``u32 point-count || points || u32 scalar-count || scalars``."""
    return b"".join(
        [struct.pack("<I", len(points)), *(p.encode() for p in points),
         struct.pack("<I", len(scalars)), *(s.encode() for s in scalars)]
    )


def read_counted(r: ByteReader, max_count: int = 1 << 20) -> tuple[list[Point], list[Scalar]]:
    np_ = r.u32()
    if np_ > max_count:
        raise DecodeError(f"implausible point count {np_}")
    pts = r.points(np_)
    ns = r.u32()
    if ns > max_count:
        raise DecodeError(f"implausible scalar count {ns}")
    return pts, r.scalars(ns)


class ProofElements:
    """Mixin: ``elements()`` and ``read(reader, **shape)`` define the layout."""

    def elements(self) -> tuple[list[Point], list[Scalar]]:
        raise NotImplementedError

    @classmethod
    def read(cls, reader: ElementReader, **shape):
        raise NotImplementedError

    @classmethod
    def from_elements(cls, points, scalars, **shape):
        reader = ElementReader(points, scalars)
        out = cls.read(reader, **shape)
        reader.finish()
        return out

    def counts(self) -> tuple[int, int]:
        pts, scs = self.elements()
        return len(pts), len(scs)

    def size_bytes(self) -> int:
        n_p, n_s = self.counts()
        return n_p * POINT_BYTES + n_s * SCALAR_BYTES


def iter_mutations(proof: ProofElements, **shape) -> Iterator[tuple[str, int, ProofElements]]:
    """Yield ``(kind, index, mutated_proof)`` for every single element.

    Points are shifted by the basepoint and scalars incremented by one, so
    each mutant still decodes and only the tampered field differs.
    """
    pts, scs = proof.elements()
    g = Point.basepoint()
    for i in range(len(pts)):
        mutated = list(pts)
        mutated[i] = mutated[i] + g
        yield "point", i, type(proof).from_elements(mutated, scs, **shape)
    for i in range(len(scs)):
        mutated = list(scs)
        mutated[i] = mutated[i] + 1
        yield "scalar", i, type(proof).from_elements(pts, mutated, **shape)
