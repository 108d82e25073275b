import math

import pytest
from hypothesis import given, settings, strategies as st

from zksvm.demo import demo_model
from zksvm.errors import BoundError, DecodeError, EncodingError, InvalidParameter
from zksvm.sensors import (
    CHANNELS, VECTOR_NAMES, SensorWindow, build_vector_set, encode_fixed_point, load_window, save_window,
    segment_window, synthesize_window, window_from_csv, window_to_csv,
)

MODEL = demo_model(n=128)


def uniform_window(t0, count, dt, touch_start, release, touch_end, value=lambda t, ch: 0.0):
    ts = [t0 + i * dt for i in range(count)]
    samples = [tuple(value(t, ch) for ch in range(6)) for t in ts]
    return SensorWindow(ts, samples, touch_start, release, touch_end)


def test_names_and_order():
    assert CHANNELS == ("accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z")
    assert len(VECTOR_NAMES) == 12
    assert VECTOR_NAMES[:3] == ("accel_x_before", "accel_x_after", "accel_y_before")


def test_window_validation():
    with pytest.raises(InvalidParameter):
        SensorWindow((0, 0), ((0,) * 6, (0,) * 6), 0, 0, 0)
    with pytest.raises(InvalidParameter):
        SensorWindow((0, 1), ((0,) * 5, (0,) * 5), 0, 0, 0)
    with pytest.raises(InvalidParameter):
        SensorWindow((0, 1), ((0,) * 6, (0,) * 6), 1, 0, 2)


def test_segment_at_midpoint():
    # samples 0..396 ms all lie in the cropped range; release at 200 halves them
    w = uniform_window(0, 100, 4.0, 50, 200, 200)
    before, after = segment_window(w)
    assert len(before) == len(after) == 50
    assert before.timestamps[-1] < 200 <= after.timestamps[0]


def test_single_sample_before_release():
    w = uniform_window(50, 60, 4.0, 50, 52, 100)
    before, after = segment_window(w)
    assert len(before) == 1 and len(after) == 59


def test_release_outside_window():
    w = uniform_window(0, 10, 4.0, 50, 500, 500)
    with pytest.raises(InvalidParameter):
        segment_window(w)


def test_synthetic_counts_sum():
    w = synthesize_window("human", seed=1, touch_ms=0.0)
    assert w.covers_period()
    assert abs(w.interval - 4.0) < 1e-9
    before, after = segment_window(w)
    assert len(before) + len(after) == len(w.timestamps)
    # 300 ms at 250 Hz, both ends included
    assert len(w.timestamps) == 76


def test_encode_examples():
    assert encode_fixed_point([0.0, 0.5], 3, 0.0, 2) == [0, 500]
    assert encode_fixed_point([-9.81], 3, 20.0, 1) == [10190]
    assert encode_fixed_point([1.0, 2.0], 0, 0.0, 5) == [1, 2, 2, 2, 2]


def test_encode_errors():
    with pytest.raises(BoundError):
        encode_fixed_point([104.8576], 4, 0.0, 1, bits=20)
    assert encode_fixed_point([104.8575], 4, 0.0, 1, bits=20) == [(1 << 20) - 1]
    with pytest.raises(EncodingError):
        encode_fixed_point([-33.0], 4, 32.0, 1)
    with pytest.raises(EncodingError):
        encode_fixed_point([math.nan], 4, 32.0, 1)
    with pytest.raises(InvalidParameter):
        encode_fixed_point([], 4, 32.0, 4)
    with pytest.raises(BoundError):
        encode_fixed_point([1.0] * 5, 4, 32.0, 4)


def test_encode_rounds_half_up():
    assert encode_fixed_point([0.00005], 4, 0.0, 1) == [1]
    assert encode_fixed_point([0.00004], 4, 0.0, 1) == [0]


@settings(max_examples=200)
@given(st.floats(-32, 72, allow_nan=False), st.floats(-32, 72, allow_nan=False))
def test_encode_monotone(a, b):
    lo, hi = sorted((a, b))
    x, y = encode_fixed_point([lo, hi], 4, 32.0, 2)
    assert x <= y


def test_constant_window_gives_constant_vectors():
    w = uniform_window(950, 100, 4.0, 1000, 1080, 1080, value=lambda t, ch: 0.25 * ch)
    vs = build_vector_set(w, MODEL)
    assert len(vs) == 12
    for v in vs.vectors:
        assert len(set(v)) == 1 and len(v) == 128


def test_vector_set_layout_and_determinism():
    w = synthesize_window("human", seed=7)
    vs = build_vector_set(w, MODEL)
    again = build_vector_set(synthesize_window("human", seed=7), MODEL)
    assert vs == again
    assert vs.names == VECTOR_NAMES
    before, after = segment_window(w)
    assert vs.counts[0] == len(before) and vs.counts[1] == len(after)
    # the first vector is accel_x before the release
    assert vs.vectors[0][:len(before)] == tuple(encode_fixed_point(before.channel(0), 4, 32.0, len(before)))
    assert all(0 <= x < 1 << 20 for v in vs.vectors for x in v)


def test_presets_differ_in_motion():
    from statistics import pstdev
    human = build_vector_set(synthesize_window("human", seed=3), MODEL)
    rest = build_vector_set(synthesize_window("rest", seed=3), MODEL)
    assert pstdev(human.vectors[7]) > 5 * pstdev(rest.vectors[7])
    with pytest.raises(InvalidParameter):
        synthesize_window("walking")


def test_csv_round_trip(tmp_path):
    w = synthesize_window("human", seed=5)
    assert window_from_csv(window_to_csv(w)) == w
    save_window(w, tmp_path / "w.csv")
    assert load_window(tmp_path / "w.csv") == w


@pytest.mark.parametrize("text", [
    "",
    "t,ax\n",
    "events,1,2,3\n0,1,2,3\n",
    "events,1,2,3\n0,1,2,3,4,5,x\n",
    "events,1,2\n",
])
def test_csv_errors(text):
    with pytest.raises(DecodeError):
        window_from_csv(text)
