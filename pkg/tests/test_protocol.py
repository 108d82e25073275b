import dataclasses
import math
import random
from fractions import Fraction

import pytest

from zksvm.demo import demo_features, demo_model
from zksvm.elements import iter_mutations
from zksvm.errors import BoundError, InvalidParameter
from zksvm.group import ORDER, Point, Scalar
from zksvm.ipzkp import LINEAR, LOG, IpStatement, check_ip_equations, ip_simulate
from zksvm.model import SvmModel, plaintext_score
from zksvm.pedersen import commit_scalar, open_check
from zksvm.protocol import (
    CONSECUTIVE_DIFFERENCE, DECISION, PARAMETERS, SCORE, STANDARD_DEVIATION, SUM, AttestationBundle,
    VectorProofSet, bundle_proof_counts, compute_score, consecutive_differences, generate_proof,
    recompute_result, scaled_variance, score_opens, vector_proof_counts, verify_bundle,
)
from zksvm.sensors import build_vector_set, synthesize_window
from zksvm.sigma import equality_relation, sigma_check, sigma_simulate

NONCE = bytes(range(32))
OTHER = bytes(range(1, 33))


def small_model(vectors=1, n=8, threshold=0.0):
    # threshold 0 accepts every valid bundle, so tampering is the only way to fail
    feats = demo_features()[:4 * vectors]
    return SvmModel(tuple(feats), "1.0", 6, n, threshold=threshold)


def random_vectors(rng, count, n, bits=20):
    return [[rng.randrange(1 << bits) for _ in range(n)] for _ in range(count)]


@pytest.fixture(scope="module")
def honest():
    model = small_model()
    rng = random.Random(11)
    vectors = random_vectors(rng, 1, 8)
    return model, vectors, generate_proof(model, vectors, NONCE, rng=rng, workers=1)


# ------------------------------------------------------------------ plaintext

def test_difference_examples():
    assert consecutive_differences([5, 5, 5, 5]) == [0, 0, 0, 0]
    assert consecutive_differences([3, 1, 4, 1]) == [2, -3, 3, 0]
    assert Scalar(-3).value == ORDER - 3


def test_variance_examples():
    assert scaled_variance([3, 1, 4, 1]) == 9 + 25 + 49 + 25 == 108
    assert math.isqrt(108) == 10
    assert scaled_variance([7, 7, 7, 7]) == 0


def test_variance_identity():
    rng = random.Random(4)
    for n in (1, 2, 4, 8, 64):
        v = [rng.randrange(1 << 20) for _ in range(n)]
        # N^3 sigma^2 with the population variance, compared in exact rationals
        var = sum((Fraction(x) - Fraction(sum(v), n)) ** 2 for x in v) / n
        assert scaled_variance(v) == n ** 3 * var


def test_compute_score_examples():
    model = small_model()
    q = model.quantized
    feats = [0, 0, 0, 0]
    score, r = compute_score(feats, [Scalar(5)] * 4, model)
    assert score == 0
    score, r = compute_score([1, 2, 3, 4], [Scalar(0)] * 4, model)
    assert score == sum(i * x for i, x in zip((1, 2, 3, 4), q)) and r == Scalar(0)
    with pytest.raises(InvalidParameter):
        compute_score([1], [Scalar(0)], model)
    zero = SvmModel(tuple(dataclasses.replace(f, weight=0) for f in model.features), "0", 6, 8)
    assert compute_score([9, 9, 9, 9], [Scalar(3)] * 4, zero) == (0, Scalar(0))


def test_single_feature_score():
    m = SvmModel(small_model().features, "0", 6, 64)
    feats = list(m.features)
    feats[0] = dataclasses.replace(feats[0], norm_scale=2, weight="0.15")
    for i in (1, 2, 3):
        feats[i] = dataclasses.replace(feats[i], weight=0)
    m = SvmModel(tuple(feats), "0", 6, 64)
    assert m.quantized == (1171, 0, 0, 0)
    assert compute_score([9, 0, 0, 0], [Scalar(1)] * 4, m)[0] == 10539


# ------------------------------------------------------------------ honest runs

def test_honest_bundle_accepts(honest):
    model, vectors, out = honest
    v = verify_bundle(model, out.bundle, NONCE, workers=1)
    assert v.accepted and v.valid and v.procedure is None
    assert v.score == out.bundle.score == plaintext_score(out.features, model)


def test_openings_match_plaintext(honest):
    model, vectors, out = honest
    params = model.params()
    (vp,), (op,) = out.bundle.vectors, out.openings
    values = vectors[0]
    diffs = consecutive_differences(values)
    assert op.values == tuple(values) and op.diff_values == tuple(diffs)
    assert open_check(params, vp.s_h, values, op.r_values)
    assert open_check(params, vp.delta.diff, diffs, op.r_diff)
    for C_avg, C_std, st, v in ((vp.mu.avg, vp.lam.std, op.stats, values),
                                (vp.mu_diff.avg, vp.lam_diff.std, op.diff_stats, diffs)):
        assert st.total == sum(v)
        assert st.var == scaled_variance(v)
        assert st.std == math.isqrt(st.var)
        assert open_check(params, C_avg, Scalar(st.total), st.r_total)
        assert open_check(params, C_std, Scalar(st.std), st.r_std)


def test_constant_vector_has_zero_variance():
    model = small_model()
    out = generate_proof(model, [[5] * 8], NONCE, rng=random.Random(2), workers=1)
    (op,) = out.openings
    assert op.stats.var == op.stats.std == 0
    assert op.diff_values == (0,) * 8 and op.diff_stats.total == 0
    assert verify_bundle(model, out.bundle, NONCE, workers=1).valid


def test_zero_vector():
    model = small_model()
    out = generate_proof(model, [[0] * 8], NONCE, rng=random.Random(2), workers=1)
    assert out.openings[0].stats.total == 0
    assert verify_bundle(model, out.bundle, NONCE, workers=1).valid


def test_res_prime_equals_commitment(honest):
    model, _, out = honest
    b = out.bundle
    res = recompute_result(b, model)
    assert res == commit_scalar(model.params(), b.score, b.r_R).point
    assert score_opens(model.params(), res, b.score, b.r_R)


def test_recomputed_bases(honest):
    model, _, _ = honest
    p = model.params()
    total = Point.identity()
    for x in p.gvec:
        total = total + x
    assert p.g_prod == total
    assert p.gvec_iter[0] == p.gvec[-1]


def test_counts_match_objects(honest):
    model, _, out = honest
    (vp,) = out.bundle.vectors
    assert vp.counts() == vector_proof_counts(8)
    assert vector_proof_counts(8) == (121 + 8 * 3, 4 * 8 + 72)
    assert vector_proof_counts(128) == (177, 584)
    assert bundle_proof_counts(12, 128) == (12 * 177, 12 * 584)


def test_seeded_prover_is_deterministic_across_workers():
    model = small_model(vectors=3)
    vectors = random_vectors(random.Random(5), 3, 8)
    a = generate_proof(model, vectors, NONCE, rng=random.Random(9), workers=1).bundle
    b = generate_proof(model, vectors, NONCE, rng=random.Random(9), workers=3).bundle
    assert a == b
    assert verify_bundle(model, a, NONCE, workers=3).valid


def test_linear_variant_bundle():
    model = small_model()
    vectors = random_vectors(random.Random(6), 1, 8)
    b = generate_proof(model, vectors, NONCE, rng=random.Random(1), workers=1, variant=LINEAR).bundle
    assert b.vectors[0].counts() == vector_proof_counts(8, variant=LINEAR)
    assert verify_bundle(model, b, NONCE, workers=1).valid


def test_bound_violation():
    model = SvmModel(small_model().features, "0", 6, 8, range_bits=16)
    with pytest.raises(BoundError):
        generate_proof(model, [[0, 1000] * 4], NONCE, rng=random.Random(1), workers=1)


def test_vector_count_and_length_checked():
    model = small_model()
    with pytest.raises(InvalidParameter):
        generate_proof(model, [[0] * 8, [0] * 8], NONCE)
    with pytest.raises(InvalidParameter):
        generate_proof(model, [[0] * 4], NONCE)


def test_demo_model_end_to_end():
    model = demo_model(n=128)
    for preset, expected in (("human", "human"), ("rest", "bot")):
        vs = build_vector_set(synthesize_window(preset, seed=21), model)
        out = generate_proof(model, vs.vectors, NONCE, rng=random.Random(3), workers=1)
        v = verify_bundle(model, out.bundle, NONCE, workers=1)
        assert v.valid
        assert v.score == plaintext_score(out.features, model)
        assert (v.procedure == DECISION) == (expected == "bot")
        assert v.accepted == (expected == "human")


# ------------------------------------------------------------------ tampering

def _tamper_field(obj):
    """One single-element mutation of a point or proof object."""
    if isinstance(obj, Point):
        return obj + Point.basepoint()
    pts, scs = obj.elements()
    shape = _shape_of(obj)
    return next(iter_mutations(obj, **shape))[2] if shape is not None else None


def _shape_of(obj):
    from zksvm.ipzkp import IpProof
    from zksvm.range_sqrt import SqrtProof
    from zksvm.sigma import SigmaProof, ZeroReplaceProof
    if isinstance(obj, IpProof):
        return {"variant": obj.variant, "n": obj.n}
    if isinstance(obj, SqrtProof):
        return {"bits": obj.bits}
    if isinstance(obj, ZeroReplaceProof):
        return {"n": len(obj.proof.responses) - 2}
    if isinstance(obj, SigmaProof):
        return {"equations": len(obj.announcements), "witnesses": len(obj.responses)}
    return None


EXPECTED = {
    "s_h": CONSECUTIVE_DIFFERENCE, "delta": CONSECUTIVE_DIFFERENCE,
    "mu": SUM, "mu_diff": SUM, "lam": STANDARD_DEVIATION, "lam_diff": STANDARD_DEVIATION,
}


def tamper_matrix(vp: VectorProofSet):
    for top in ("s_h", "delta", "mu", "mu_diff", "lam", "lam_diff"):
        value = getattr(vp, top)
        if isinstance(value, Point):
            yield top, top, dataclasses.replace(vp, s_h=_tamper_field(value))
            continue
        for f in dataclasses.fields(value):
            bad = _tamper_field(getattr(value, f.name))
            yield top, f"{top}.{f.name}", dataclasses.replace(vp, **{top: dataclasses.replace(value, **{f.name: bad})})


def test_tamper_matrix_names_the_procedure(honest):
    model, _, out = honest
    b = out.bundle
    seen = 0
    for top, name, vp in tamper_matrix(b.vectors[0]):
        v = verify_bundle(model, dataclasses.replace(b, vectors=(vp,)), NONCE, workers=1)
        assert not v.valid, name
        assert v.procedure == EXPECTED[top], (name, v.reason)
        assert v.vector == 0 and "vector 0" in v.reason
        seen += 1
    assert seen == 1 + 4 + 2 + 2 + 10 + 10


def test_score_tampering(honest):
    model, _, out = honest
    b = out.bundle
    for bad in (dataclasses.replace(b, score=b.score + 1), dataclasses.replace(b, r_R=b.r_R + 1),
                dataclasses.replace(b, score=b.score + ORDER)):
        v = verify_bundle(model, bad, NONCE, workers=1)
        assert not v.valid and v.procedure == SCORE


def test_replay_under_new_nonce(honest):
    model, _, out = honest
    v = verify_bundle(model, out.bundle, OTHER, workers=1)
    assert not v.valid and v.procedure == PARAMETERS
    # rewriting the echo does not help: the proofs are bound to the old nonce
    rewritten = dataclasses.replace(out.bundle, nonce=OTHER)
    v = verify_bundle(model, rewritten, OTHER, workers=1)
    assert not v.valid and v.procedure == CONSECUTIVE_DIFFERENCE


def test_parameter_mismatch(honest):
    model, _, out = honest
    other_label = SvmModel(model.features, model.intercept, model.d, model.n, label="other")
    assert verify_bundle(other_label, out.bundle, NONCE).procedure == PARAMETERS
    other_n = SvmModel(model.features, model.intercept, model.d, 16)
    assert verify_bundle(other_n, out.bundle, NONCE).procedure == PARAMETERS
    two = small_model(vectors=2)
    assert verify_bundle(two, out.bundle, NONCE).procedure == PARAMETERS


def test_model_substitution_rejected(honest):
    # same shape, different weights: the model digest is in the transcript
    model, _, out = honest
    feats = list(model.features)
    feats[0] = dataclasses.replace(feats[0], weight="0.5")
    other = SvmModel(tuple(feats), model.intercept, model.d, model.n, threshold=0.0)
    v = verify_bundle(other, out.bundle, NONCE, workers=1)
    assert not v.valid


def test_first_failing_vector_reported():
    model = small_model(vectors=3)
    vectors = random_vectors(random.Random(8), 3, 8)
    b = generate_proof(model, vectors, NONCE, rng=random.Random(1), workers=1).bundle
    vps = list(b.vectors)
    vps[1] = dataclasses.replace(vps[1], mu=dataclasses.replace(vps[1].mu, avg=vps[1].mu.avg + Point.basepoint()))
    vps[2] = dataclasses.replace(vps[2], s_h=vps[2].s_h + Point.basepoint())
    bad = dataclasses.replace(b, vectors=tuple(vps))
    for workers in (1, 3):
        v = verify_bundle(model, bad, NONCE, workers=workers)
        assert v.vector == 1 and v.procedure == SUM


# ------------------------------------------------------------------ simulation

def test_simulated_sub_proofs_pass_the_equations(honest):
    model, _, out = honest
    p = model.params()
    rng = random.Random(77)
    vp = out.bundle.vectors[0]
    # the statements of one vector's inner-product proofs, with no witness used
    N = Scalar(p.n)
    statements = [
        IpStatement(vp.s_h + p.h_prod, vp.mu.avg, p),
        IpStatement(vp.s_h * N - vp.lam.G + vp.lam.H_S * N - vp.lam.H, vp.lam.var, p),
        IpStatement(vp.delta.diff + p.h_prod, vp.mu_diff.avg, p),
    ]
    for stmt in statements:
        proof, C = ip_simulate(stmt, rng)
        assert check_ip_equations(stmt, proof.S, proof.T1, proof.T2, C, proof.l, proof.r,
                                  proof.t_hat, proof.tau, proof.mu)
    rels = [
        equality_relation(p, "g", "g_iter", vp.s_h, vp.delta.s_iter),
        equality_relation(p, [p.g], [p.g_prod], vp.mu.avg, vp.lam.G),
        equality_relation(p, "g", "h", vp.s_h, vp.lam.H_S),
    ]
    for rel in rels:
        c = Scalar.random_nonzero(rng)
        assert sigma_check(rel, sigma_simulate(rel, c, rng), c)


def test_bundle_elements_round_trip(honest):
    model, _, out = honest
    b = out.bundle
    pts, scs = b.elements()
    again = AttestationBundle.from_elements(pts, scs, count=1, n=8, bits=64, variant=LOG, score=b.score,
                                            r_R=b.r_R, nonce=b.nonce, label=b.label)
    assert again == b
