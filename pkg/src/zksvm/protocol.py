"""zkSVM prover and verifier.

For each committed sensor vector ``S_H = <v, gvec> + r*h`` the prover builds

* the consecutive-difference commitment ``Diff`` (via the rotated basis,
  an equality proof and a zero-replace proof),
* for both ``S_H`` and ``Diff``: the sum commitment ``Avg`` with an
  inner-product proof against ``S_H + sum(hvec)``, and the scaled variance
  ``Var = Commit(sum (N*v_i - sum v)^2)`` with an inner-product proof over
  ``A_S = N*S_H - G + N*H_S - H``, plus ``Std = Commit(isqrt(Var))`` with a
  square-root proof.

The 48 feature commitments (``Avg, Std, Avg', Std'`` per vector) are folded
by the public quantized weights into ``Res``, which the prover opens as
``(Score, r_R)``. The verifier recomputes ``Res`` itself.

Transcripts: one root per bundle binding the server nonce, the generator
label, ``n`` and the model digest. Each vector forks from the root and
absorbs its ``S_H``; each sub-proof then forks from the vector transcript,
so a failure is attributed to exactly one check.
"""
from __future__ import annotations

import math
import os
import random
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from zksvm.elements import ElementReader, ProofElements
from zksvm.errors import BoundError, InvalidParameter
from zksvm.group import CommitParams, Point, Scalar, multiexp
from zksvm.ipzkp import LINEAR, LOG, IpProof, IpStatement, IpWitness, ip_proof_counts, ip_prove, ip_verify
from zksvm.model import SvmModel, evaluate_sigmoid
from zksvm.pedersen import VectorCommitment, commit_scalar, commit_vector
from zksvm.range_sqrt import SqrtProof, prove_sqrt, sqrt_proof_counts, verify_sqrt
from zksvm.sigma import (
    EqualityProof, ZeroReplaceProof, prove_equality, prove_zero_replace, verify_equality, verify_zero_replace,
)
from zksvm.transcript import Transcript

BUNDLE_DOMAIN = b"zksvm/bundle/v1"

# check names, in verification order
CONSECUTIVE_DIFFERENCE = "consecutive-difference"
SUM = "sum"
STANDARD_DEVIATION = "standard-deviation"
SCORE = "score"
DECISION = "decision"
PARAMETERS = "parameters"


@dataclass(frozen=True)
class DiffProofs(ProofElements):
    """``[Diff, S_H^iter, Pi_Eq, Pi_0]``."""

    diff: Point
    s_iter: Point
    eq: EqualityProof
    zero: ZeroReplaceProof

    def elements(self):
        pts, scs = [self.diff, self.s_iter], []
        for part in (self.eq, self.zero):
            p, s = part.elements()
            pts += p
            scs += s
        return pts, scs

    @classmethod
    def read(cls, reader: ElementReader, n: int):
        diff, s_iter = reader.points(2)
        return cls(diff, s_iter, EqualityProof.read(reader, equations=2, witnesses=n + 2),
                   ZeroReplaceProof.read(reader, n=n))


@dataclass(frozen=True)
class SumProofs(ProofElements):
    """``[Avg, Pi_IP^mu]``."""

    avg: Point
    ip: IpProof

    def elements(self):
        pts, scs = self.ip.elements()
        return [self.avg, *pts], scs

    @classmethod
    def read(cls, reader: ElementReader, n: int, variant: str = LOG):
        return cls(reader.point(), IpProof.read(reader, variant=variant, n=n))


@dataclass(frozen=True)
class StdProofs(ProofElements):
    """``[G, H, H_S, Pi_Eq^G, Pi_Eq^H, Pi_Eq^S, Var, Pi_IP^var, Std, Pi_sqrt]``."""

    G: Point
    H: Point
    H_S: Point
    eq_G: EqualityProof
    eq_H: EqualityProof
    eq_S: EqualityProof
    var: Point
    ip: IpProof
    std: Point
    sqrt: SqrtProof

    def elements(self):
        pts, scs = [self.G, self.H, self.H_S], []
        for part in (self.eq_G, self.eq_H, self.eq_S):
            p, s = part.elements()
            pts += p
            scs += s
        pts.append(self.var)
        p, s = self.ip.elements()
        pts += p
        scs += s
        pts.append(self.std)
        p, s = self.sqrt.elements()
        return pts + p, scs + s

    @classmethod
    def read(cls, reader: ElementReader, n: int, bits: int, variant: str = LOG):
        G, H, H_S = reader.points(3)
        eq_G = EqualityProof.read(reader, equations=2, witnesses=3)
        eq_H = EqualityProof.read(reader, equations=2, witnesses=3)
        eq_S = EqualityProof.read(reader, equations=2, witnesses=n + 2)
        var = reader.point()
        ip = IpProof.read(reader, variant=variant, n=n)
        std = reader.point()
        return cls(G, H, H_S, eq_G, eq_H, eq_S, var, ip, std, SqrtProof.read(reader, bits=bits))


@dataclass(frozen=True)
class VectorProofSet(ProofElements):
    s_h: Point
    delta: DiffProofs
    mu: SumProofs
    mu_diff: SumProofs
    lam: StdProofs
    lam_diff: StdProofs

    def elements(self):
        pts, scs = [self.s_h], []
        for part in (self.delta, self.mu, self.mu_diff, self.lam, self.lam_diff):
            p, s = part.elements()
            pts += p
            scs += s
        return pts, scs

    @classmethod
    def read(cls, reader: ElementReader, n: int, bits: int, variant: str = LOG):
        return cls(
            reader.point(),
            DiffProofs.read(reader, n=n),
            SumProofs.read(reader, n=n, variant=variant),
            SumProofs.read(reader, n=n, variant=variant),
            StdProofs.read(reader, n=n, bits=bits, variant=variant),
            StdProofs.read(reader, n=n, bits=bits, variant=variant),
        )

    def feature_commitments(self) -> tuple[Point, Point, Point, Point]:
        """In model order: mean, std, diff_mean, diff_std."""
        return self.mu.avg, self.lam.std, self.mu_diff.avg, self.lam_diff.std


@dataclass(frozen=True)
class AttestationBundle(ProofElements):
    vectors: tuple[VectorProofSet, ...]
    score: int
    r_R: Scalar
    nonce: bytes
    label: bytes
    n: int
    bits: int = 64
    variant: str = LOG

    def elements(self):
        pts, scs = [], []
        for v in self.vectors:
            p, s = v.elements()
            pts += p
            scs += s
        return pts, scs

    @classmethod
    def read(cls, reader: ElementReader, count: int, n: int, bits: int, variant: str = LOG, **rest):
        vecs = tuple(VectorProofSet.read(reader, n=n, bits=bits, variant=variant) for _ in range(count))
        return cls(vecs, n=n, bits=bits, variant=variant, **rest)


def vector_proof_counts(n: int, bits: int = 64, variant: str = LOG) -> tuple[int, int]:
    """(points, scalars) in one VectorProofSet.

    With the log variant this is ``121 + 8*log2(n)`` points and ``4n + 72``
    scalars at 64 bits.
    """
    ip_p, ip_s = ip_proof_counts(variant, n)
    sq_p, sq_s = sqrt_proof_counts(bits)
    delta = (2 + 2 + 4, (n + 2) * 2)
    mu = (1 + ip_p, ip_s)
    lam = (3 + 2 * 3 + 1 + ip_p + 1 + sq_p, 3 + 3 + (n + 2) + ip_s + sq_s)
    return 1 + delta[0] + 2 * mu[0] + 2 * lam[0], delta[1] + 2 * mu[1] + 2 * lam[1]


def bundle_proof_counts(vectors: int, n: int, bits: int = 64, variant: str = LOG) -> tuple[int, int]:
    p, s = vector_proof_counts(n, bits, variant)
    return vectors * p, vectors * s


# ---------------------------------------------------------------- prover side


@dataclass(frozen=True)
class StatisticOpenings:
    """Prover-side openings for one committed vector (``S_H`` or ``Diff``)."""

    total: int          # sum v_i
    r_total: Scalar
    var: int            # sum (N*v_i - total)^2
    r_var: Scalar
    std: int            # isqrt(var)
    r_std: Scalar


@dataclass(frozen=True)
class VectorOpenings:
    values: tuple[int, ...]
    diff_values: tuple[int, ...]
    stats: StatisticOpenings
    diff_stats: StatisticOpenings
    r_values: Scalar = Scalar(0)    # blinding of S_H
    r_diff: Scalar = Scalar(0)      # blinding of Diff

    def features(self) -> tuple[int, int, int, int]:
        return self.stats.total, self.stats.std, self.diff_stats.total, self.diff_stats.std

    def blindings(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return self.stats.r_total, self.stats.r_std, self.diff_stats.r_total, self.diff_stats.r_std


@dataclass(frozen=True)
class ProverOutput:
    bundle: AttestationBundle
    openings: tuple[VectorOpenings, ...]

    @property
    def features(self) -> tuple[int, ...]:
        return tuple(f for o in self.openings for f in o.features())


def consecutive_differences(values: Sequence[int]) -> list[int]:
    """``(v1 - v2, ..., v_{n-1} - v_n, 0)``."""
    v = [int(x) for x in values]
    return [a - b for a, b in zip(v, v[1:])] + [0]


def scaled_variance(values: Sequence[int]) -> int:
    """``sum (N*v_i - sum v)^2`` over the integers, i.e. ``N^3 * var``."""
    v = [int(x) for x in values]
    n, total = len(v), sum(v)
    return sum((n * x - total) ** 2 for x in v)


def root_transcript(params: CommitParams, model: SvmModel | None, nonce: bytes, n_vectors: int) -> Transcript:
    t = Transcript(BUNDLE_DOMAIN)
    t.bind_server_challenge(nonce)
    t.absorb(b"params-label", params.label)
    t.absorb_int(b"n", params.n)
    t.absorb_int(b"vectors", n_vectors)
    if model is not None:
        t.absorb(b"model", model.digest())
    return t


def vector_transcript(root: Transcript, index: int, s_h: Point) -> Transcript:
    t = root.fork(b"vector" + struct.pack("<I", index))
    t.absorb_point(b"S_H", s_h)
    return t


def _prove_statistics(params: CommitParams, C: VectorCommitment, values: Sequence[int], t: Transcript,
                      prefix: bytes, bits: int, variant: str, rng) -> tuple[SumProofs, StdProofs, StatisticOpenings]:
    n = params.n
    g, h = params.g, params.h
    total = sum(values)
    var_int = scaled_variance(values)
    if var_int >= 1 << bits:
        raise BoundError(f"scaled variance {var_int} does not fit in {bits} bits")
    std_int = math.isqrt(var_int)

    # sum: <v, 1> = total against A = S_H + sum(hvec)
    avg = commit_scalar(params, total, Scalar.random(rng))
    ones = [Scalar(1)] * n
    stmt = IpStatement(C.point + params.h_prod, avg.point, params)
    wit = IpWitness.of(C.mvec, ones, C.r, avg.r, total)
    ip_mu = ip_prove(stmt, wit, variant, t.fork(prefix + b"sum"), rng)
    sums = SumProofs(avg.point, ip_mu)

    # the sum under both aggregated bases, and v under hvec
    r_G, r_H, r_S = Scalar.random(rng), Scalar.random(rng), Scalar.random(rng)
    G = multiexp([params.g_prod, h], [total, r_G])
    H = multiexp([params.h_prod, h], [total, r_H])
    H_S = commit_vector(params, "h", C.mvec, r_S)
    eq_G = prove_equality(params, [g], [params.g_prod], avg.point, G, [total], avg.r, r_G,
                          t.fork(prefix + b"std-G"), rng)
    eq_H = prove_equality(params, [g], [params.h_prod], avg.point, H, [total], avg.r, r_H,
                          t.fork(prefix + b"std-H"), rng)
    eq_S = prove_equality(params, "g", "h", C.point, H_S.point, C.mvec, C.r, r_S,
                          t.fork(prefix + b"std-S"), rng)

    # variance: <N v - total, N v - total> = var_int
    N = Scalar(n)
    A_S = C.point * N - G + H_S.point * N - H
    centered = [n * int(x) - total for x in values]
    var = commit_scalar(params, var_int, Scalar.random(rng))
    alpha = N * C.r - r_G + N * r_S - r_H
    stmt = IpStatement(A_S, var.point, params)
    ip_var = ip_prove(stmt, IpWitness.of(centered, centered, alpha, var.r, var_int), variant,
                      t.fork(prefix + b"std-var"), rng)

    std = commit_scalar(params, std_int, Scalar.random(rng))
    sqrt = prove_sqrt(params, std.point, var.point, std_int, var_int, std.r, var.r, bits,
                      t.fork(prefix + b"std-sqrt"), rng)
    stds = StdProofs(G, H, H_S.point, eq_G, eq_H, eq_S, var.point, ip_var, std.point, sqrt)
    return sums, stds, StatisticOpenings(total, avg.r, var_int, var.r, std_int, std.r)


def prove_vector(params: CommitParams, values: Sequence[int], root: Transcript, index: int,
                 bits: int = 64, variant: str = LOG, rng=None) -> tuple[VectorProofSet, VectorOpenings]:
    n = params.n
    values = [int(x) for x in values]
    if len(values) != n:
        raise InvalidParameter(f"vector {index} has length {len(values)}, expected {n}")
    s_h = commit_vector(params, "g", values, Scalar.random(rng))
    t = vector_transcript(root, index, s_h.point)

    # consecutive difference
    s_iter = commit_vector(params, "g_iter", values, Scalar.random(rng))
    eq = prove_equality(params, "g", "g_iter", s_h.point, s_iter.point, s_h.mvec, s_h.r, s_iter.r,
                        t.fork(b"diff-eq"), rng)
    # S_H - S_iter carries v_i - v_{i+1} at i < n and v_n - v_1 at n
    wrapped = [a - b for a, b in zip(values, values[1:] + values[:1])]
    r_bar = s_h.r - s_iter.r
    diff, zero = prove_zero_replace(params, s_h.point - s_iter.point, wrapped, r_bar, n,
                                    Scalar.random(rng), t.fork(b"diff-zero"), rng)
    diff_values = consecutive_differences(values)
    delta = DiffProofs(diff.point, s_iter.point, eq, zero)

    mu, lam, stats = _prove_statistics(params, s_h, values, t, b"", bits, variant, rng)
    mu_d, lam_d, dstats = _prove_statistics(params, diff, diff_values, t, b"diff/", bits, variant, rng)
    proofs = VectorProofSet(s_h.point, delta, mu, mu_d, lam, lam_d)
    return proofs, VectorOpenings(tuple(values), tuple(diff_values), stats, dstats, s_h.r, diff.r)


def compute_score(features: Sequence[int], blindings: Sequence[Scalar], model: SvmModel) -> tuple[int, Scalar]:
    """``(sum f_i*q_i, sum r_i*q_i)``; the score is an exact signed integer."""
    q = model.quantized
    if len(features) != len(q) or len(blindings) != len(q):
        raise InvalidParameter(f"expected {len(q)} features, got {len(features)}")
    score = sum(int(f) * qi for f, qi in zip(features, q))
    r_R = Scalar(sum(int(r) * qi for r, qi in zip(blindings, q)))
    return score, r_R


def _child_rngs(rng, k: int):
    # a seeded generator is split deterministically so threading does not
    # change the output; the system generator is shared as is
    if rng is None or isinstance(rng, random.SystemRandom):
        return [rng] * k
    return [random.Random(rng.getrandbits(256)) for _ in range(k)]


def _workers(k: int, workers: int | None) -> int:
    return max(1, min(k, workers if workers is not None else (os.cpu_count() or 1)))


def _map(fn, k: int, workers: int | None) -> list:
    workers = _workers(k, workers)
    if workers == 1:
        return [fn(i) for i in range(k)]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, range(k)))


def generate_proof(model: SvmModel, vectors: Sequence[Sequence[int]], nonce: bytes, rng=None,
                   workers: int | None = None, variant: str = LOG) -> ProverOutput:
    """Run the full prover over ``vectors`` (one per model vector group)."""
    if len(vectors) != model.num_vectors:
        raise InvalidParameter(f"model expects {model.num_vectors} vectors, got {len(vectors)}")
    params = model.params()
    root = root_transcript(params, model, nonce, len(vectors))
    rngs = _child_rngs(rng, len(vectors))

    def one(i):
        return prove_vector(params, vectors[i], root, i, model.range_bits, variant, rngs[i])

    results = _map(one, len(vectors), workers)
    proofs = tuple(p for p, _ in results)
    openings = tuple(o for _, o in results)
    features = [f for o in openings for f in o.features()]
    blindings = [r for o in openings for r in o.blindings()]
    score, r_R = compute_score(features, blindings, model)
    bundle = AttestationBundle(proofs, score, r_R, bytes(nonce), params.label, params.n,
                               model.range_bits, variant)
    return ProverOutput(bundle, openings)


def prove_bundle(model: SvmModel, vectors: Sequence[Sequence[int]], nonce: bytes, rng=None,
                 workers: int | None = None, variant: str = LOG) -> AttestationBundle:
    return generate_proof(model, vectors, nonce, rng, workers, variant).bundle


# -------------------------------------------------------------- verifier side


@dataclass(frozen=True)
class Verdict:
    accepted: bool              # proofs valid and classified human
    valid: bool                 # every proof and the score opening verified
    reason: str
    procedure: str | None = None
    vector: int | None = None
    s: float | None = None
    score: int | None = None

    def __bool__(self):
        return self.accepted


@dataclass(frozen=True)
class _Failure:
    procedure: str
    check: str


def verify_consecutive_difference(params: CommitParams, vp: VectorProofSet, t: Transcript) -> str | None:
    d = vp.delta
    if not verify_equality(params, "g", "g_iter", vp.s_h, d.s_iter, d.eq, t.fork(b"diff-eq")):
        return "equality of S_H and S_H^iter"
    if not verify_zero_replace(params, vp.s_h - d.s_iter, d.diff, params.n, d.zero, t.fork(b"diff-zero")):
        return "zero-replace proof for Diff"
    return None


def verify_sum(params: CommitParams, C: Point, mu: SumProofs, t: Transcript, prefix: bytes) -> str | None:
    stmt = IpStatement(C + params.h_prod, mu.avg, params)
    if not ip_verify(stmt, mu.ip, t.fork(prefix + b"sum")):
        return "inner-product proof for Avg"
    return None


def verify_std(params: CommitParams, C: Point, avg: Point, lam: StdProofs, t: Transcript, prefix: bytes,
               bits: int) -> str | None:
    g = params.g
    if not verify_equality(params, [g], [params.g_prod], avg, lam.G, lam.eq_G, t.fork(prefix + b"std-G")):
        return "equality of Avg and G"
    if not verify_equality(params, [g], [params.h_prod], avg, lam.H, lam.eq_H, t.fork(prefix + b"std-H")):
        return "equality of Avg and H"
    if not verify_equality(params, "g", "h", C, lam.H_S, lam.eq_S, t.fork(prefix + b"std-S")):
        return "equality of S_H and H_S"
    N = Scalar(params.n)
    A_S = multiexp([C, lam.G, lam.H_S, lam.H], [N, Scalar(-1), N, Scalar(-1)])
    if not ip_verify(IpStatement(A_S, lam.var, params), lam.ip, t.fork(prefix + b"std-var")):
        return "inner-product proof for Var"
    if not verify_sqrt(params, lam.std, lam.var, lam.sqrt, bits, t.fork(prefix + b"std-sqrt")):
        return "square-root proof for Std"
    return None


def verify_vector(params: CommitParams, vp: VectorProofSet, root: Transcript, index: int,
                  bits: int = 64) -> _Failure | None:
    t = vector_transcript(root, index, vp.s_h)
    why = verify_consecutive_difference(params, vp, t)
    if why:
        return _Failure(CONSECUTIVE_DIFFERENCE, why)
    for C, mu, prefix in ((vp.s_h, vp.mu, b""), (vp.delta.diff, vp.mu_diff, b"diff/")):
        why = verify_sum(params, C, mu, t, prefix)
        if why:
            return _Failure(SUM, why + (" (difference vector)" if prefix else ""))
    for C, avg, lam, prefix in ((vp.s_h, vp.mu.avg, vp.lam, b""),
                                (vp.delta.diff, vp.mu_diff.avg, vp.lam_diff, b"diff/")):
        why = verify_std(params, C, avg, lam, t, prefix, bits)
        if why:
            return _Failure(STANDARD_DEVIATION, why + (" (difference vector)" if prefix else ""))
    return None


def recompute_result(bundle: AttestationBundle, model: SvmModel) -> Point:
    """``Res' = sum_i q_i * Comm_i`` over the feature commitments."""
    comms = [c for vp in bundle.vectors for c in vp.feature_commitments()]
    return multiexp(comms, [Scalar(q) for q in model.quantized])


def score_opens(params: CommitParams, res: Point, score: int, r_R: Scalar) -> bool:
    return multiexp([params.g, params.h], [Scalar(score), r_R]) == res


def _vector_name(model: SvmModel, i: int) -> str:
    name = model.features[4 * i].name
    return name.rsplit(".", 1)[0]


def verify_bundle(model: SvmModel, bundle: AttestationBundle, nonce: bytes,
                  workers: int | None = None, params: CommitParams | None = None) -> Verdict:
    params = params or model.params()
    if bundle.label != params.label or bundle.n != params.n:
        return Verdict(False, False, "bundle parameters do not match the model", PARAMETERS)
    if bundle.bits != model.range_bits:
        return Verdict(False, False, f"bundle uses {bundle.bits}-bit range proofs, model expects "
                                     f"{model.range_bits}", PARAMETERS)
    if bundle.variant not in (LINEAR, LOG):
        return Verdict(False, False, f"unknown inner-product variant {bundle.variant!r}", PARAMETERS)
    if len(bundle.vectors) != model.num_vectors:
        return Verdict(False, False, f"bundle has {len(bundle.vectors)} vectors, model expects "
                                     f"{model.num_vectors}", PARAMETERS)
    if bytes(bundle.nonce) != bytes(nonce):
        return Verdict(False, False, "nonce echo does not match the issued challenge", PARAMETERS)
    root = root_transcript(params, model, nonce, len(bundle.vectors))

    def one(i):
        return verify_vector(params, bundle.vectors[i], root, i, bundle.bits)

    k = len(bundle.vectors)
    if _workers(k, workers) == 1:
        # sequential: stop at the first failing vector
        failures = []
        for i in range(k):
            failures.append(one(i))
            if failures[-1] is not None:
                break
    else:
        failures = _map(one, k, workers)
    for i, f in enumerate(failures):
        if f is not None:
            reason = f"{f.procedure} check failed for vector {i} ({_vector_name(model, i)}): {f.check}"
            return Verdict(False, False, reason, f.procedure, i)

    # score must be the centred representative so the sigmoid sees one value
    if Scalar(bundle.score).to_signed() != bundle.score:
        return Verdict(False, False, "score outside the signed scalar range", SCORE, score=bundle.score)
    res = recompute_result(bundle, model)
    if not score_opens(params, res, bundle.score, bundle.r_R):
        return Verdict(False, False, "score check failed: (Score, r_R) does not open Res'", SCORE,
                       score=bundle.score)
    s, decision = evaluate_sigmoid(bundle.score, model)
    if decision != "human":
        return Verdict(False, True, f"classified as bot (s={s:.6f} < {model.threshold})", DECISION,
                       s=s, score=bundle.score)
    return Verdict(True, True, f"accepted (s={s:.6f})", None, s=s, score=bundle.score)


__all__ = [
    "AttestationBundle", "DiffProofs", "SumProofs", "StdProofs", "VectorProofSet", "Verdict",
    "ProverOutput", "VectorOpenings", "StatisticOpenings", "generate_proof", "prove_bundle",
    "prove_vector", "verify_bundle", "verify_vector", "compute_score", "recompute_result",
    "vector_proof_counts", "bundle_proof_counts", "consecutive_differences", "scaled_variance",
]
