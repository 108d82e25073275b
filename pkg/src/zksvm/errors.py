class ZkError(Exception):
    """Base class for library errors."""


class InvalidParameter(ZkError, ValueError):
    """A caller-supplied parameter is outside the supported domain."""


class PreconditionError(ZkError):
    """The prover was asked to prove a false statement and refuses."""


class BoundError(PreconditionError):
    """A value exceeds the bound a range statement can carry."""


class DecodeError(ZkError, ValueError):
    """Malformed wire data. Distinct from a proof that decodes but fails."""


class EncodingError(ZkError, ValueError):
    """Sensor samples cannot be mapped to the fixed-point integer encoding."""


class TruncatedInput(DecodeError):
    """The input ended before the structure it announces."""


class UnsupportedVersion(DecodeError):
    """Unknown format version byte."""


class NonCanonicalEncoding(DecodeError):
    """A point or scalar is not in canonical form."""
