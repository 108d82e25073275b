import json
import math
from decimal import Decimal
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zksvm.demo import demo_model
from zksvm.errors import InvalidParameter
from zksvm.group import ORDER, Scalar
from zksvm.model import (
    Feature, SvmModel, evaluate_sigmoid, feature_factor, plaintext_score, quantize_weight, setup, sigmoid,
)


def q_oracle(w, s, kind, n, d):
    """Independent exact route: rationals, with N^(3/2) handled via isqrt."""
    R = Fraction(w) * 10**d / (Fraction(s) * n)
    if kind.endswith("mean"):
        return math.floor(R)
    # floor(R / sqrt(n)) = sign(R) * sqrt(R^2 / n), rounded toward -inf
    x = R * R / n
    k = math.isqrt(math.floor(x))
    if R >= 0:
        return k
    return -k if k * k == x else -(k + 1)


def one_vector(weights=("1", "1", "1", "1"), scales=("1", "1", "1", "1"), means=("0", "0", "0", "0"),
               intercept="0", d=3, n=4):
    kinds = ("mean", "std", "diff_mean", "diff_std")
    feats = [Feature(f"v.{k}", k, m, s, w) for k, m, s, w in zip(kinds, means, scales, weights)]
    return SvmModel(tuple(feats), intercept, d, n)


def test_quantize_examples():
    assert quantize_weight("1.0", "1.0", 1, 3) == 1000
    assert quantize_weight("0.15", "2.0", 64, 6) == 1171
    assert quantize_weight("-0.5", "1", 1, 2) == -50
    assert Scalar(-50).value == ORDER - 50
    # exact rational check of 1171
    assert math.floor(Fraction(15, 100) / (64 * 2) * 10**6) == 1171


def test_quantize_zero_scale():
    with pytest.raises(InvalidParameter):
        quantize_weight("1", "0", 1, 3)
    with pytest.raises(InvalidParameter):
        Feature("x", "mean", 0, 0, 1)


def test_average_feature_in_model():
    m = one_vector(weights=("0.15", "0", "0", "0"), scales=("2.0", "1", "1", "1"), d=6, n=64)
    assert m.quantized[0] == 1171


@settings(max_examples=200, deadline=None)
@given(
    st.decimals(min_value=-5, max_value=5, places=4, allow_nan=False),
    st.decimals(min_value=Decimal("0.001"), max_value=1000, places=3, allow_nan=False),
    st.sampled_from(("mean", "std", "diff_mean", "diff_std")),
    st.sampled_from((1, 4, 8, 64, 128, 256)),
    st.integers(1, 9),
)
def test_quantize_matches_oracle(w, s, kind, n, d):
    assert quantize_weight(w, s, feature_factor(kind, n), d) == q_oracle(str(w), str(s), kind, n, d)


def test_feature_factor():
    assert feature_factor("mean", 64) == 64
    assert feature_factor("diff_std", 64) == 512
    assert abs(float(feature_factor("std", 128)) - 128 ** 1.5) < 1e-9


def test_model_validation():
    with pytest.raises(InvalidParameter):
        one_vector(d=0)
    with pytest.raises(InvalidParameter):
        one_vector(d=10)
    with pytest.raises(InvalidParameter):
        one_vector(n=6)
    feats = one_vector().features
    with pytest.raises(InvalidParameter):
        SvmModel(feats[:3], 0, 3, 4)
    with pytest.raises(InvalidParameter):
        SvmModel((feats[1], feats[0], feats[2], feats[3]), 0, 3, 4)


def test_setup_returns_params():
    model, params = setup(one_vector().features, "0.5", 3, 8)
    assert params.n == 8 and params.label == b"zksvm-v1"
    assert model.params() == params


def test_sigmoid_midpoint_and_asymptotes():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(800.0) == 1.0
    assert sigmoid(-800.0) == 0.0
    m = one_vector(intercept="0")
    assert evaluate_sigmoid(0, m) == (0.5, "human")


def test_sigmoid_score_oracle():
    m = one_vector(intercept="-0.01", d=6)
    assert m.adjusted_intercept == Decimal("-0.01")
    s, decision = evaluate_sigmoid(10539, m)
    with mpmath.workdps(50):
        expect = 1 / (mpmath.e ** (-(mpmath.mpf("-0.01") + mpmath.mpf(10539) / 10**6)) + 1)
    assert abs(s - float(expect)) < 1e-9
    assert decision == "human"


def test_intercept_folds_means():
    m = one_vector(weights=("2", "0", "0", "0"), scales=("4", "1", "1", "1"), means=("10", "0", "0", "0"),
                   intercept="1")
    assert m.adjusted_intercept == Decimal(1) - Decimal(10) * 2 / 4


def test_threshold_decision():
    m = SvmModel(one_vector().features, "0", 3, 4, threshold=0.9)
    assert evaluate_sigmoid(0, m)[1] == "bot"
    assert evaluate_sigmoid(10**6, m)[1] == "human"


def test_plaintext_score():
    m = one_vector(weights=("0.15", "0", "0", "0"), scales=("2.0", "1", "1", "1"), d=6, n=64)
    assert plaintext_score([9, 0, 0, 0], m) == 10539
    with pytest.raises(InvalidParameter):
        plaintext_score([9], m)


def test_json_round_trip(tmp_path):
    m = demo_model(n=64, d=6)
    path = tmp_path / "m.json"
    m.save(path)
    again = SvmModel.load(path)
    assert again == m
    assert again.quantized == m.quantized
    assert again.digest() == m.digest()
    assert json.loads(path.read_text())["format"] == "zksvm-model/1"


def test_digest_changes_with_weights():
    a = one_vector(weights=("1", "1", "1", "1"))
    b = one_vector(weights=("1", "1", "1", "1.5"))
    assert a.digest() != b.digest()


def test_bad_model_document():
    with pytest.raises(InvalidParameter):
        SvmModel.from_json('{"format": "other"}')
    with pytest.raises(InvalidParameter):
        SvmModel.from_json('{"format": "zksvm-model/1", "features": []}')
