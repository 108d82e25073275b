"""IMU windows to the 12 integer vectors the prover commits to.

A click window runs from 50 ms before the touch starts to 250 ms after it
ends and is split at the finger release. Each of the six channels
(accelerometer and gyroscope, x/y/z) contributes one vector per segment, in
this fixed order::

    accel_x_before, accel_x_after, accel_y_before, ..., gyro_z_after

Encoding of a reading ``x``: ``round_half_up((x + offset) * 10^k)``, which
must land in ``[0, 2^B)``. Segments shorter than ``n`` are padded by
repeating their last value.

Window file (CSV)::

    events,<touch_start_ms>,<release_ms>,<touch_end_ms>
    t,ax,ay,az,gx,gy,gz
    950.0,0.012,-0.034,9.81,0.001,0.002,-0.001
    ...
"""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence

from zksvm.errors import BoundError, DecodeError, EncodingError, InvalidParameter

SENSORS = ("accel", "gyro")
AXES = ("x", "y", "z")
SEGMENTS = ("before", "after")
CHANNELS = tuple(f"{s}_{a}" for s in SENSORS for a in AXES)
VECTOR_NAMES = tuple(f"{c}_{seg}" for c in CHANNELS for seg in SEGMENTS)

LEAD_MS = 50.0
TAIL_MS = 250.0
DEFAULT_RATE_HZ = 250.0


@dataclass(frozen=True)
class SensorWindow:
    timestamps: tuple[float, ...]
    samples: tuple[tuple[float, ...], ...]   # one 6-tuple per timestamp
    touch_start: float
    release: float
    touch_end: float

    def __post_init__(self):
        object.__setattr__(self, "timestamps", tuple(float(t) for t in self.timestamps))
        object.__setattr__(self, "samples", tuple(tuple(float(x) for x in s) for s in self.samples))
        if len(self.timestamps) != len(self.samples):
            raise InvalidParameter("timestamps and samples differ in length")
        if len(self.timestamps) < 2:
            raise InvalidParameter("a window needs at least two samples")
        if any(len(s) != len(CHANNELS) for s in self.samples):
            raise InvalidParameter(f"every sample needs {len(CHANNELS)} channel values")
        if any(b <= a for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise InvalidParameter("timestamps must be strictly increasing")
        if not self.touch_start <= self.release <= self.touch_end:
            raise InvalidParameter("events must satisfy touch_start <= release <= touch_end")

    @property
    def interval(self) -> float:
        ts = self.timestamps
        return (ts[-1] - ts[0]) / (len(ts) - 1)

    def covers_period(self) -> bool:
        """Whether the samples reach 50 ms before the touch and 250 ms after
        it, up to one sampling interval."""
        dt = self.interval
        return (self.timestamps[0] <= self.touch_start - LEAD_MS + dt
                and self.timestamps[-1] >= self.touch_end + TAIL_MS - dt)

    def channel(self, index: int) -> list[float]:
        return [s[index] for s in self.samples]


@dataclass(frozen=True)
class Segment:
    name: str
    timestamps: tuple[float, ...]
    samples: tuple[tuple[float, ...], ...]

    def channel(self, index: int) -> list[float]:
        return [s[index] for s in self.samples]

    def __len__(self):
        return len(self.timestamps)


def segment_window(w: SensorWindow) -> tuple[Segment, Segment]:
    """Split at the release: ``t < release`` before, ``t >= release`` after.

    Samples outside ``[touch_start - 50, touch_end + 250]`` are dropped.
    """
    lo, hi = w.touch_start - LEAD_MS, w.touch_end + TAIL_MS
    kept = [(t, s) for t, s in zip(w.timestamps, w.samples) if lo <= t <= hi]
    before = [(t, s) for t, s in kept if t < w.release]
    after = [(t, s) for t, s in kept if t >= w.release]
    if not before or not after:
        raise InvalidParameter(f"release at {w.release} ms does not split the window into two nonempty segments")
    return (
        Segment("before", tuple(t for t, _ in before), tuple(s for _, s in before)),
        Segment("after", tuple(t for t, _ in after), tuple(s for _, s in after)),
    )


def encode_fixed_point(samples: Sequence[float], scale_exp: int, offset: float, n: int, bits: int = 20) -> list[int]:
    """``round_half_up((x + offset) * 10^scale_exp)`` per sample, padded to ``n``."""
    if not samples:
        raise InvalidParameter("cannot encode an empty segment")
    if len(samples) > n:
        raise BoundError(f"segment has {len(samples)} samples, more than the vector length {n}")
    off = Decimal(repr(float(offset)))
    unit = Decimal(10) ** scale_exp
    out = []
    for x in samples:
        if not math.isfinite(x):
            raise EncodingError(f"non-finite sample {x}")
        shifted = Decimal(repr(float(x))) + off
        if shifted < 0:
            raise EncodingError(f"sample {x} is negative after adding offset {offset}")
        v = int((shifted * unit).to_integral_value(rounding=ROUND_HALF_UP))
        if v >= 1 << bits:
            raise BoundError(f"sample {x} encodes to {v}, which needs more than {bits} bits")
        out.append(v)
    return out + [out[-1]] * (n - len(out))


@dataclass(frozen=True)
class EncodedVectorSet:
    vectors: tuple[tuple[int, ...], ...]
    names: tuple[str, ...]
    offset: float
    scale_exp: int
    bits: int
    counts: tuple[int, ...]     # real samples per vector before padding

    def __len__(self):
        return len(self.vectors)


def build_vector_set(w: SensorWindow, model) -> EncodedVectorSet:
    """Encode ``w`` under ``model.encoding`` into ``model.n``-length vectors."""
    enc = model.encoding
    segments = segment_window(w)
    vectors, counts = [], []
    for ch in range(len(CHANNELS)):
        for seg in segments:
            vals = seg.channel(ch)
            vectors.append(tuple(encode_fixed_point(vals, enc.scale_exp, enc.offset, model.n, enc.bits)))
            counts.append(len(vals))
    return EncodedVectorSet(tuple(vectors), VECTOR_NAMES, enc.offset, enc.scale_exp, enc.bits, tuple(counts))


# ------------------------------------------------------------ synthetic data

PRESETS = ("human", "rest")


def synthesize_window(preset: str = "human", seed: int | None = None, rate_hz: float = DEFAULT_RATE_HZ,
                      touch_ms: float | None = None) -> SensorWindow:
    """Synthetic click window.

    ``rest`` is a device lying flat: gravity on z and sensor noise only.
    ``human`` is a handheld device: tilted gravity, slow hand sway, and a
    damped jolt when the finger lands and again when it lifts.
    """
    if preset not in PRESETS:
        raise InvalidParameter(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    rng = random.Random(seed)
    dt = 1000.0 / rate_hz
    touch = touch_ms if touch_ms is not None else rng.uniform(60.0, 160.0)
    start = 1000.0
    end = start + touch
    t0 = start - LEAD_MS
    count = int(math.ceil((end + TAIL_MS - t0) / dt)) + 1
    ts = [round(t0 + i * dt, 3) for i in range(count)]

    if preset == "rest":
        grav = (0.0, 0.0, 9.81)
        a_noise, g_noise = 0.004, 0.0008
        sway_a = sway_g = jolt_a = jolt_g = 0.0
    else:
        tilt, roll = rng.uniform(0.3, 0.9), rng.uniform(-0.3, 0.3)
        grav = (9.81 * math.sin(roll), 9.81 * math.sin(tilt), 9.81 * math.cos(tilt) * math.cos(roll))
        a_noise, g_noise = 0.02, 0.004
        sway_a, sway_g = rng.uniform(0.05, 0.2), rng.uniform(0.02, 0.08)
        jolt_a, jolt_g = rng.uniform(0.4, 1.5), rng.uniform(0.1, 0.5)
    freq = rng.uniform(0.8, 2.0)
    ring = rng.uniform(15.0, 30.0)
    phase = [rng.uniform(0, 2 * math.pi) for _ in range(6)]
    direction = [rng.uniform(-1, 1) for _ in range(6)]

    def jolt(t: float, at: float) -> float:
        if t < at:
            return 0.0
        s = (t - at) / 1000.0
        return math.exp(-s * 25.0) * math.sin(2 * math.pi * ring * s)

    samples = []
    for t in ts:
        s = t / 1000.0
        row = []
        for ch in range(6):
            base = grav[ch] if ch < 3 else 0.0
            sway = (sway_a if ch < 3 else sway_g) * math.sin(2 * math.pi * freq * s + phase[ch])
            amp = jolt_a if ch < 3 else jolt_g
            impulse = amp * direction[ch] * (jolt(t, start) + 0.6 * jolt(t, end))
            noise = rng.gauss(0.0, a_noise if ch < 3 else g_noise)
            row.append(round(base + sway + impulse + noise, 6))
        samples.append(tuple(row))
    return SensorWindow(tuple(ts), tuple(samples), start, end, end)


# ------------------------------------------------------------------- CSV I/O


def window_to_csv(w: SensorWindow) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["events", repr(w.touch_start), repr(w.release), repr(w.touch_end)])
    out.writerow(["t", "ax", "ay", "az", "gx", "gy", "gz"])
    for t, s in zip(w.timestamps, w.samples):
        out.writerow([repr(t), *(repr(x) for x in s)])
    return buf.getvalue()


def window_from_csv(text: str) -> SensorWindow:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    try:
        head = rows[0]
        if head[0].strip() != "events" or len(head) != 4:
            raise DecodeError("first line must be 'events,<touch_start>,<release>,<touch_end>'")
        touch_start, release, touch_end = (float(x) for x in head[1:])
        body = rows[1:]
        if body and body[0][0].strip() == "t":
            body = body[1:]
        ts, samples = [], []
        for i, r in enumerate(body):
            if len(r) != 7:
                raise DecodeError(f"data row {i + 1} has {len(r)} fields, expected 7")
            vals = [float(x) for x in r]
            ts.append(vals[0])
            samples.append(tuple(vals[1:]))
    except DecodeError:
        raise
    except IndexError:
        raise DecodeError("empty window file") from None
    except ValueError as exc:
        raise DecodeError(f"bad number in window file: {exc}") from None
    return SensorWindow(tuple(ts), tuple(samples), touch_start, release, touch_end)


def load_window(path) -> SensorWindow:
    return window_from_csv(Path(path).read_text())


def save_window(w: SensorWindow, path) -> None:
    Path(path).write_text(window_to_csv(w))
