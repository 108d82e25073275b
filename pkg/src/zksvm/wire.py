"""Binary bundle envelope.

Layout (integers little-endian)::

    u8   version (= 1)
    u16  label length, label bytes
    u32  n
    u16  vector count
    u16  range bits
    u8   inner-product variant (0 linear, 1 log)
    u8   nonce length, nonce bytes
    u32  point count, u32 scalar count
    points  (32 bytes each, compressed ristretto255)
    scalars (32 bytes each, canonical little-endian)
    u8   score length, score as signed ASCII decimal
    32   r_R

The point and scalar counts must equal the closed-form counts for the
header's shape; the element order is the ``elements()`` order of
:class:`zksvm.protocol.AttestationBundle`.
"""
from __future__ import annotations

import re
import struct
from dataclasses import dataclass

from zksvm.elements import ByteReader
from zksvm.errors import DecodeError, UnsupportedVersion
from zksvm.group import POINT_BYTES, SCALAR_BYTES, Scalar
from zksvm.ipa import is_power_of_two
from zksvm.ipzkp import LINEAR, LOG
from zksvm.protocol import AttestationBundle, bundle_proof_counts, vector_proof_counts
from zksvm.range_sqrt import SUPPORTED_BITS

VERSION = 1
MAX_N = 1 << 16
MAX_VECTORS = 1024
_VARIANTS = {LINEAR: 0, LOG: 1}
_SCORE_RE = re.compile(rb"-?(0|[1-9][0-9]*)")


@dataclass(frozen=True)
class SizeReport:
    n: int
    vectors: int
    points_per_vector: int
    scalars_per_vector: int
    overhead_bytes: int

    @property
    def bytes_per_vector(self) -> int:
        return self.points_per_vector * POINT_BYTES + self.scalars_per_vector * SCALAR_BYTES

    @property
    def points(self) -> int:
        return self.vectors * self.points_per_vector

    @property
    def scalars(self) -> int:
        return self.vectors * self.scalars_per_vector

    @property
    def total_bytes(self) -> int:
        return self.vectors * self.bytes_per_vector + self.overhead_bytes


def envelope_overhead(label: bytes, nonce_len: int, score: int) -> int:
    """Bytes outside the point/scalar payload."""
    return (1 + 2 + len(label) + 4 + 2 + 2 + 1 + 1 + nonce_len + 4 + 4
            + 1 + len(str(score)) + SCALAR_BYTES)


def size_report(n: int, vectors: int = 12, bits: int = 64, variant: str = LOG, label: bytes = b"zksvm-v1",
                nonce_len: int = 32, score: int = 0) -> SizeReport:
    p, s = vector_proof_counts(n, bits, variant)
    return SizeReport(n, vectors, p, s, envelope_overhead(label, nonce_len, score))


def encode_bundle(b: AttestationBundle) -> bytes:
    pts, scs = b.elements()
    score = str(int(b.score)).encode()
    if len(b.nonce) > 255 or len(score) > 255:
        raise DecodeError("nonce or score too long to encode")
    parts = [
        struct.pack("<BH", VERSION, len(b.label)), b.label,
        struct.pack("<IHHB", b.n, len(b.vectors), b.bits, _VARIANTS[b.variant]),
        struct.pack("<B", len(b.nonce)), bytes(b.nonce),
        struct.pack("<II", len(pts), len(scs)),
        *(p.encode() for p in pts),
        *(s.encode() for s in scs),
        struct.pack("<B", len(score)), score,
        b.r_R.encode(),
    ]
    return b"".join(parts)


def decode_bundle(data: bytes) -> AttestationBundle:
    r = ByteReader(data)
    version = r.u8()
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported bundle version {version}")
    label = r.take(r.u16())
    n, count, bits, vb = struct.unpack("<IHHB", r.take(9))
    variant = {v: k for k, v in _VARIANTS.items()}.get(vb)
    if variant is None:
        raise DecodeError(f"unknown inner-product variant byte {vb}")
    if not label:
        raise DecodeError("empty parameter label")
    if not is_power_of_two(n) or n > MAX_N:
        raise DecodeError(f"bad vector length {n}")
    if not 1 <= count <= MAX_VECTORS:
        raise DecodeError(f"bad vector count {count}")
    if bits not in SUPPORTED_BITS:
        raise DecodeError(f"unsupported range bit length {bits}")
    nonce = r.take(r.u8())
    n_points, n_scalars = r.u32(), r.u32()
    if (n_points, n_scalars) != bundle_proof_counts(count, n, bits, variant):
        raise DecodeError(f"element counts ({n_points}, {n_scalars}) do not match the bundle shape")
    pts = r.points(n_points)
    scs = r.scalars(n_scalars)
    raw_score = r.take(r.u8())
    if not _SCORE_RE.fullmatch(raw_score):
        raise DecodeError("score is not a decimal integer")
    r_R = Scalar.decode(r.take(SCALAR_BYTES))
    r.finish()
    return AttestationBundle.from_elements(
        pts, scs, count=count, n=n, bits=bits, variant=variant,
        score=int(raw_score), r_R=r_R, nonce=nonce, label=label,
    )


def bundle_size(b: AttestationBundle) -> int:
    return len(encode_bundle(b))
