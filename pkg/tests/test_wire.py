import dataclasses
import random

import pytest

from zksvm.demo import demo_features
from zksvm.errors import DecodeError, NonCanonicalEncoding, TruncatedInput, UnsupportedVersion
from zksvm.group import ORDER, POINT_BYTES, SCALAR_BYTES
from zksvm.ipzkp import LINEAR
from zksvm.model import SvmModel
from zksvm.protocol import generate_proof, vector_proof_counts, verify_bundle
from zksvm.wire import bundle_size, decode_bundle, encode_bundle, envelope_overhead, size_report

NONCE = b"\x42" * 32


@pytest.fixture(scope="module")
def bundle():
    model = SvmModel(tuple(demo_features()[:8]), "1.0", 6, 8, threshold=0.0)
    rng = random.Random(31)
    vectors = [[rng.randrange(1 << 20) for _ in range(8)] for _ in range(2)]
    return model, generate_proof(model, vectors, NONCE, rng=rng, workers=1).bundle


def test_round_trip(bundle):
    model, b = bundle
    data = encode_bundle(b)
    again = decode_bundle(data)
    assert again == b
    assert encode_bundle(again) == data
    assert verify_bundle(model, again, NONCE, workers=1).valid


def test_negative_score_round_trip(bundle):
    _, b = bundle
    neg = dataclasses.replace(b, score=-123456789)
    assert decode_bundle(encode_bundle(neg)).score == -123456789


def test_linear_variant_round_trip():
    model = SvmModel(tuple(demo_features()[:4]), "1.0", 6, 4)
    b = generate_proof(model, [[1, 2, 3, 4]], NONCE, rng=random.Random(1), workers=1, variant=LINEAR).bundle
    assert decode_bundle(encode_bundle(b)) == b


def test_size_accounting_matches(bundle):
    _, b = bundle
    rep = size_report(8, vectors=2, label=b.label, score=b.score)
    assert (rep.points_per_vector, rep.scalars_per_vector) == vector_proof_counts(8)
    assert rep.total_bytes == bundle_size(b) == len(encode_bundle(b))
    assert rep.total_bytes == 2 * rep.bytes_per_vector + envelope_overhead(b.label, 32, b.score)


def test_twelve_vector_total():
    rep = size_report(128, vectors=12)
    assert rep.total_bytes == 12 * rep.bytes_per_vector + rep.overhead_bytes
    assert (rep.points_per_vector, rep.scalars_per_vector) == (177, 584)
    assert rep.bytes_per_vector == 177 * POINT_BYTES + 584 * SCALAR_BYTES


def test_one_more_recursion_round():
    a, b = size_report(128), size_report(256)
    # four inner-product proofs per vector, each gains an (L, R) pair
    assert b.points_per_vector - a.points_per_vector == 4 * 2
    # the n-length sigma responses grow linearly: 4 per entry
    assert b.scalars_per_vector - a.scalars_per_vector == 4 * 128
    assert b.bytes_per_vector - a.bytes_per_vector == 8 * POINT_BYTES + 512 * SCALAR_BYTES


def test_truncation(bundle):
    _, b = bundle
    data = encode_bundle(b)
    for cut in (1, 10, 33, len(data) - 1):
        with pytest.raises(TruncatedInput):
            decode_bundle(data[:-cut])
    with pytest.raises(DecodeError):
        decode_bundle(data + b"\x00")


def test_bad_version(bundle):
    _, b = bundle
    data = bytearray(encode_bundle(b))
    data[0] = 2
    with pytest.raises(UnsupportedVersion):
        decode_bundle(bytes(data))


def _payload_offset(b):
    return 1 + 2 + len(b.label) + 9 + 1 + len(b.nonce) + 8


def test_non_canonical_point(bundle):
    _, b = bundle
    data = bytearray(encode_bundle(b))
    off = _payload_offset(b)
    data[off + 31] |= 0x80
    with pytest.raises(NonCanonicalEncoding):
        decode_bundle(bytes(data))


def test_non_canonical_scalar(bundle):
    _, b = bundle
    data = bytearray(encode_bundle(b))
    n_pts = sum(vector_proof_counts(8)[0] for _ in range(2))
    off = _payload_offset(b) + n_pts * POINT_BYTES
    data[off:off + 32] = ORDER.to_bytes(32, "little")
    with pytest.raises(NonCanonicalEncoding):
        decode_bundle(bytes(data))


@pytest.mark.parametrize("patch", [
    lambda d, b: d[:3 + len(b.label)] + (6).to_bytes(4, "little") + d[7 + len(b.label):],   # n not 2^k
    lambda d, b: d[:3 + len(b.label) + 8] + b"\x09" + d[3 + len(b.label) + 9:],             # variant byte
    lambda d, b: d[:3 + len(b.label) + 6] + (12).to_bytes(2, "little") + d[3 + len(b.label) + 8:],  # bits
])
def test_header_validation(bundle, patch):
    _, b = bundle
    with pytest.raises(DecodeError):
        decode_bundle(patch(encode_bundle(b), b))


def test_bad_score_text(bundle):
    _, b = bundle
    data = encode_bundle(dataclasses.replace(b, score=12))
    bad = data[:-34] + b"\x02" + b"+2" + data[-32:]
    assert decode_bundle(data).score == 12
    with pytest.raises(DecodeError):
        decode_bundle(bad)
