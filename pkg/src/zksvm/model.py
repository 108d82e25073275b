"""Public SVM model, quantized weights and the sigmoid decision.

Features come in groups of four per committed vector, in this order:
``mean``, ``std``, ``diff_mean``, ``diff_std``. Inside the proofs a mean is
carried as the sum ``N*mean`` and a standard deviation as
``isqrt(N^3 * var)``, i.e. scaled by ``N^(3/2)``. The quantized weight
``q_i = floor(w_i / (N_i * S_i) * 10^d)`` divides that factor back out, so
``Score / 10^d`` approximates ``sum_i f_i * w_i / S_i``.

The normalisation means only touch public data and fold into the intercept::

    c' = c - sum_i M_i * w_i / S_i
    s  = 1 / (1 + exp(-(c' + Score / 10^d)))

Model file (JSON)::

    {
      "format": "zksvm-model/1",
      "label": "zksvm-v1",          # generator derivation label
      "n": 128,                      # committed vector length, power of two
      "d": 9,                        # decimal digits kept by quantization
      "intercept": -1.5,             # c
      "threshold": 0.5,              # human iff s >= threshold
      "range_bits": 64,
      "encoding": {"offset": 32.0, "scale_exp": 4, "bits": 20},
      "features": [
        {"name": "accel_x_before.mean", "kind": "mean",
         "norm_mean": 0.0, "norm_scale": 1.0, "weight": 0.0},
        ...
      ]
    }

Decimal numbers are read exactly as written (not through binary floats)
before quantization.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_FLOOR, Decimal, localcontext
from functools import cached_property
from pathlib import Path
from typing import Sequence

from zksvm.errors import InvalidParameter
from zksvm.group import CommitParams, derive_params
from zksvm.ipa import is_power_of_two

MODEL_FORMAT = "zksvm-model/1"
FEATURE_KINDS = ("mean", "std", "diff_mean", "diff_std")
HUMAN, BOT = "human", "bot"


def _dec(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, float):
        return Decimal(repr(x))
    return Decimal(x)


def feature_factor(kind: str, n: int) -> Decimal:
    """N for mean-type features, N^(3/2) for std-type features."""
    if kind not in FEATURE_KINDS:
        raise InvalidParameter(f"unknown feature kind {kind!r}")
    with localcontext() as ctx:
        ctx.prec = 80
        N = Decimal(n)
        return +N if kind.endswith("mean") else N * N.sqrt()


def quantize_weight(weight, scale, factor, d: int) -> int:
    """``floor(weight / (factor * scale) * 10^d)`` in exact decimal arithmetic."""
    scale = _dec(scale)
    if scale == 0:
        raise InvalidParameter("normalisation scale must be nonzero")
    with localcontext() as ctx:
        ctx.prec = 80
        x = _dec(weight) / (_dec(factor) * scale) * (Decimal(10) ** d)
        return int(x.to_integral_value(rounding=ROUND_FLOOR))


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str
    norm_mean: Decimal
    norm_scale: Decimal
    weight: Decimal

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise InvalidParameter(f"unknown feature kind {self.kind!r}")
        for attr in ("norm_mean", "norm_scale", "weight"):
            object.__setattr__(self, attr, _dec(getattr(self, attr)))
        if self.norm_scale == 0:
            raise InvalidParameter(f"feature {self.name}: normalisation scale must be nonzero")


@dataclass(frozen=True)
class EncodingConfig:
    """Fixed-point sensor encoding: ``round((x + offset) * 10^scale_exp)``."""

    offset: float = 32.0
    scale_exp: int = 4
    bits: int = 20


@dataclass(frozen=True)
class SvmModel:
    features: tuple[Feature, ...]
    intercept: Decimal
    d: int
    n: int
    label: str = "zksvm-v1"
    threshold: float = 0.5
    range_bits: int = 64
    encoding: EncodingConfig = field(default_factory=EncodingConfig)

    def __post_init__(self):
        object.__setattr__(self, "intercept", _dec(self.intercept))
        object.__setattr__(self, "features", tuple(self.features))
        if not 1 <= self.d <= 9:
            raise InvalidParameter(f"precision digits d must be in [1, 9], got {self.d}")
        if not is_power_of_two(self.n):
            raise InvalidParameter(f"vector length must be a power of two, got {self.n}")
        if not self.features or len(self.features) % 4:
            raise InvalidParameter("features must come in groups of four per vector")
        for i, f in enumerate(self.features):
            if f.kind != FEATURE_KINDS[i % 4]:
                raise InvalidParameter(f"feature {i} ({f.name}) should be of kind {FEATURE_KINDS[i % 4]}")

    @property
    def N(self) -> int:
        return self.n

    @property
    def num_vectors(self) -> int:
        return len(self.features) // 4

    @cached_property
    def quantized(self) -> tuple[int, ...]:
        return tuple(
            quantize_weight(f.weight, f.norm_scale, feature_factor(f.kind, self.n), self.d)
            for f in self.features
        )

    @cached_property
    def adjusted_intercept(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = 80
            return self.intercept - sum((f.norm_mean * f.weight / f.norm_scale for f in self.features), Decimal(0))

    def exponent(self, score: int) -> float:
        """``c' + Score / 10^d``: the argument of the sigmoid."""
        with localcontext() as ctx:
            ctx.prec = 80
            return float(self.adjusted_intercept + Decimal(score) / (Decimal(10) ** self.d))

    def params(self) -> CommitParams:
        return derive_params(self.label.encode(), self.n)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "label": self.label,
            "n": self.n,
            "d": self.d,
            "intercept": self.intercept,
            "threshold": self.threshold,
            "range_bits": self.range_bits,
            "encoding": {
                "offset": self.encoding.offset,
                "scale_exp": self.encoding.scale_exp,
                "bits": self.encoding.bits,
            },
            "features": [
                {"name": f.name, "kind": f.kind, "norm_mean": f.norm_mean,
                 "norm_scale": f.norm_scale, "weight": f.weight}
                for f in self.features
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_decimal)

    @classmethod
    def from_dict(cls, doc: dict) -> "SvmModel":
        if doc.get("format") != MODEL_FORMAT:
            raise InvalidParameter(f"unsupported model format {doc.get('format')!r}")
        try:
            enc = doc.get("encoding", {})
            return cls(
                features=tuple(
                    Feature(f["name"], f["kind"], f["norm_mean"], f["norm_scale"], f["weight"])
                    for f in doc["features"]
                ),
                intercept=doc["intercept"],
                d=int(doc["d"]),
                n=int(doc["n"]),
                label=str(doc.get("label", "zksvm-v1")),
                threshold=float(doc.get("threshold", 0.5)),
                range_bits=int(doc.get("range_bits", 64)),
                encoding=EncodingConfig(
                    offset=float(enc.get("offset", 32.0)),
                    scale_exp=int(enc.get("scale_exp", 4)),
                    bits=int(enc.get("bits", 20)),
                ),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidParameter(f"malformed model document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "SvmModel":
        return cls.from_dict(json.loads(text, parse_float=Decimal))

    @classmethod
    def load(cls, path) -> "SvmModel":
        return cls.from_json(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def digest(self) -> bytes:
        """Hash of the canonical model document; bound into every proof."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), default=_json_decimal)
        return hashlib.sha256(canon.encode()).digest()


def _json_decimal(x):
    if isinstance(x, Decimal):
        return float(x) if x != x.to_integral_value() or abs(x) > 2**53 else int(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def setup(features: Sequence[Feature], intercept, d: int, n: int, label: str = "zksvm-v1", **kw):
    """Build the model and derive its commitment parameters."""
    model = SvmModel(tuple(features), intercept, d, n, label, **kw)
    return model, model.params()


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def evaluate_sigmoid(score: int, model: SvmModel) -> tuple[float, str]:
    s = sigmoid(model.exponent(score))
    return s, HUMAN if s >= model.threshold else BOT


def plaintext_score(features: Sequence[int], model: SvmModel) -> int:
    """``sum f_i * q_i`` over the integers."""
    if len(features) != len(model.quantized):
        raise InvalidParameter("feature count does not match model")
    return sum(int(f) * q for f, q in zip(features, model.quantized))
