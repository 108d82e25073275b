"""A hand-set demonstration model for the synthetic click windows.

Training is out of scope; these normalisation constants and weights were
picked by looking at the statistics of :func:`zksvm.sensors.synthesize_window`
output. They are in encoded units (``(x + 32) * 10^4``). Std-type features
carry most of the weight: a handheld device moves, a device at rest does not.
"""
from __future__ import annotations

from zksvm.model import EncodingConfig, Feature, SvmModel
from zksvm.sensors import VECTOR_NAMES

# (mean M, mean S, std M, std S) per sensor
_NORMS = {
    "accel": (330000, 20000, 300, 300),
    "gyro": (320000, 200, 80, 80),
}
_WEIGHTS = {"mean": 0.05, "std": 1.2, "diff_mean": -0.1, "diff_std": 0.8}
_INTERCEPT = "1.0"


def demo_features() -> list[Feature]:
    out = []
    for name in VECTOR_NAMES:
        m_mean, s_mean, m_std, s_std = _NORMS[name.split("_")[0]]
        for kind in ("mean", "std", "diff_mean", "diff_std"):
            if kind == "mean":
                M, S = m_mean, s_mean
            elif kind == "diff_mean":
                M, S = 0, s_std / 10
            else:
                M, S = (m_std, s_std) if kind == "std" else (m_std / 2, s_std / 2)
            out.append(Feature(f"{name}.{kind}", kind, str(M), str(S), str(_WEIGHTS[kind])))
    return out


def demo_model(n: int = 128, d: int = 9, label: str = "zksvm-v1", threshold: float = 0.5) -> SvmModel:
    return SvmModel(tuple(demo_features()), _INTERCEPT, d, n, label, threshold, 64, EncodingConfig())
