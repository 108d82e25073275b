"""Fiat-Shamir transcript over SHAKE-256.

Every absorption is framed as::

    u32le(len(label)) || label || u64le(len(data)) || data

and challenges are squeezed from a copy of the running state, so the
challenge stream is a pure function of the ordered absorptions. Deriving a
challenge also absorbs a ``b"challenge"`` frame carrying the label, so two
successive challenges never coincide.
"""
from __future__ import annotations

import hashlib
import struct

from zksvm.errors import InvalidParameter
from zksvm.group import ORDER, Point, Scalar

PROTOCOL_DOMAIN = b"zksvm/transcript/v1"
MIN_NONCE_BYTES = 16


class Transcript:
    def __init__(self, domain: bytes = PROTOCOL_DOMAIN):
        self._state = hashlib.shake_256()
        self.absorb(b"domain", domain)

    def absorb(self, label: bytes, data: bytes) -> "Transcript":
        self._state.update(struct.pack("<I", len(label)) + label + struct.pack("<Q", len(data)))
        self._state.update(data)
        return self

    def absorb_point(self, label: bytes, p: Point) -> "Transcript":
        return self.absorb(label, p.encode())

    def absorb_points(self, label: bytes, points) -> "Transcript":
        return self.absorb(label, b"".join(p.encode() for p in points))

    def absorb_scalar(self, label: bytes, s: Scalar) -> "Transcript":
        return self.absorb(label, s.encode())

    def absorb_int(self, label: bytes, x: int) -> "Transcript":
        return self.absorb(label, struct.pack("<Q", x))

    def challenge_scalar(self, label: bytes) -> Scalar:
        """Derive a nonzero scalar and advance the state."""
        self.absorb(b"challenge", label)
        retry = 0
        while True:
            c = int.from_bytes(self._state.copy().digest(64), "little") % ORDER
            if c:
                return Scalar(c)
            retry += 1
            self.absorb(b"retry", struct.pack("<I", retry))

    def bind_server_challenge(self, nonce: bytes) -> "Transcript":
        if len(nonce) < MIN_NONCE_BYTES:
            raise InvalidParameter(f"server nonce must be at least {MIN_NONCE_BYTES} bytes, got {len(nonce)}")
        return self.absorb(b"server-nonce", nonce)

    def clone(self) -> "Transcript":
        t = Transcript.__new__(Transcript)
        t._state = self._state.copy()
        return t

    def fork(self, label: bytes) -> "Transcript":
        """Clone and tag, for sub-proofs that run independently."""
        return self.clone().absorb(b"fork", label)


def absorb(t: Transcript, label: bytes, data: bytes) -> Transcript:
    return t.absorb(label, data)


def challenge_scalar(t: Transcript, label: bytes) -> Scalar:
    return t.challenge_scalar(label)


def bind_server_challenge(t: Transcript, nonce: bytes) -> Transcript:
    return t.bind_server_challenge(nonce)
