"""Command line interface.

Exit codes: 0 accepted / success, 1 rejected, 2 usage or I/O error.

Sensor files are CSV: a first line ``events,<touch_start>,<release>,<touch_end>``
(milliseconds), then ``t,ax,ay,az,gx,gy,gz`` rows. Nonces are hex strings of
at least 16 bytes.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import random
import sys
import time
from pathlib import Path

from zksvm.errors import DecodeError, ZkError
from zksvm.model import SvmModel, evaluate_sigmoid
from zksvm.sensors import PRESETS, build_vector_set, load_window, save_window, synthesize_window

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("zksvm")


class UsageError(Exception):
    pass


def _nonce(text: str) -> bytes:
    try:
        nonce = bytes.fromhex(text)
    except ValueError:
        raise UsageError(f"nonce must be hex, got {text!r}") from None
    if len(nonce) < 16:
        raise UsageError("nonce must be at least 16 bytes")
    return nonce


def _ns(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"bad list of vector lengths {text!r}") from None


def cmd_init_model(args) -> int:
    from zksvm.demo import demo_model

    model = demo_model(n=args.n, d=args.d, label=args.label, threshold=args.threshold)
    model.save(args.out)
    print(f"wrote {args.out} (n={model.n}, d={model.d}, {len(model.features)} features)")
    return EXIT_OK


def cmd_simulate_window(args) -> int:
    w = synthesize_window(args.preset, args.seed)
    save_window(w, args.out)
    print(f"wrote {args.out}: {len(w.timestamps)} samples, touch {w.touch_start:.1f}-{w.touch_end:.1f} ms")
    if args.figure:
        from zksvm.plotting import plot_window

        plot_window(w, args.figure)
        print(f"figure: {args.figure}")
    return EXIT_OK


def cmd_features(args) -> int:
    from zksvm.protocol import consecutive_differences, scaled_variance

    model = SvmModel.load(args.model)
    w = load_window(args.sensors)
    vs = build_vector_set(w, model)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["feature", "value", "q", "contribution"])
    total = 0
    feats = []
    for v in vs.vectors:
        d = consecutive_differences(v)
        feats += [sum(v), math.isqrt(scaled_variance(v)), sum(d), math.isqrt(scaled_variance(d))]
    for f, q, value in zip(model.features, model.quantized, feats):
        total += q * value
        out.writerow([f.name, value, q, q * value])
    s, decision = evaluate_sigmoid(total, model)
    out.writerow(["score", total, "", ""])
    print(f"# s={s:.6f} decision={decision}", file=sys.stderr)
    if args.figure:
        from zksvm.plotting import plot_window

        plot_window(w, args.figure)
        print(f"# figure: {args.figure}", file=sys.stderr)
    return EXIT_OK


def cmd_prove(args) -> int:
    from zksvm.protocol import generate_proof
    from zksvm.wire import encode_bundle

    model = SvmModel.load(args.model)
    nonce = _nonce(args.nonce)
    vs = build_vector_set(load_window(args.sensors), model)
    rng = random.Random(args.seed) if args.seed is not None else None
    t0 = time.perf_counter()
    out = generate_proof(model, vs.vectors, nonce, rng=rng, workers=args.workers)
    elapsed = time.perf_counter() - t0
    data = encode_bundle(out.bundle)
    Path(args.out).write_bytes(data)
    print(f"wrote {args.out}: {len(data)} bytes, score {out.bundle.score}, proved in {elapsed:.2f} s")
    return EXIT_OK


def cmd_verify(args) -> int:
    from zksvm.protocol import verify_bundle
    from zksvm.wire import decode_bundle

    model = SvmModel.load(args.model)
    nonce = _nonce(args.nonce)
    data = Path(args.bundle).read_bytes()
    try:
        bundle = decode_bundle(data)
    except DecodeError as exc:
        # a bundle that does not parse is a rejection, reported as such
        print(f"reject: malformed bundle: {exc}", file=sys.stderr)
        print("reject procedure=decode")
        return EXIT_REJECT
    t0 = time.perf_counter()
    verdict = verify_bundle(model, bundle, nonce, workers=args.workers)
    elapsed = time.perf_counter() - t0
    if verdict.accepted:
        print(f"accept score={verdict.score} s={verdict.s:.6f} time={elapsed:.3f}s")
        return EXIT_OK
    print(f"reject: {verdict.reason}", file=sys.stderr)
    print(f"reject procedure={verdict.procedure} time={elapsed:.3f}s")
    return EXIT_REJECT


def cmd_sizes(args) -> int:
    from zksvm.wire import size_report

    model = SvmModel.load(args.model)
    ns = _ns(args.n) if args.n else [model.n]
    reports = [size_report(n, model.num_vectors, model.range_bits, label=model.label.encode()) for n in ns]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "vectors", "points_per_vector", "scalars_per_vector", "bytes_per_vector",
                  "total_points", "total_scalars", "envelope_overhead", "total_bytes"])
    for r in reports:
        out.writerow([r.n, r.vectors, r.points_per_vector, r.scalars_per_vector, r.bytes_per_vector,
                      r.points, r.scalars, r.overhead_bytes, r.total_bytes])
    if args.figure:
        from zksvm.plotting import plot_sizes

        plot_sizes(reports, args.figure)
        print(f"# figure: {args.figure}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    from zksvm.service import AttestationService, make_server

    model = SvmModel.load(args.model)
    server = make_server(AttestationService(model, ttl=args.ttl), args.host, args.port)
    print(f"serving on http://{server.server_address[0]}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zksvm", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("init-model", help="write the demonstration model file")
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int, default=128)
    s.add_argument("--d", type=int, default=9)
    s.add_argument("--label", default="zksvm-v1")
    s.add_argument("--threshold", type=float, default=0.5)
    s.set_defaults(func=cmd_init_model)

    s = sub.add_parser("simulate-window", help="write a synthetic sensor window")
    s.add_argument("--preset", choices=PRESETS, default="human")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--figure", help="also plot the window to this image file")
    s.set_defaults(func=cmd_simulate_window)

    s = sub.add_parser("features", help="print plaintext features and score contributions as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--sensors", required=True)
    s.add_argument("--figure")
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("prove", help="prove a sensor window under a server nonce")
    s.add_argument("--model", required=True)
    s.add_argument("--sensors", required=True)
    s.add_argument("--nonce", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, help="deterministic blinding (testing only)")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("verify", help="verify a bundle; exit 0 accept, 1 reject")
    s.add_argument("--model", required=True)
    s.add_argument("--bundle", required=True)
    s.add_argument("--nonce", required=True)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sizes", help="proof size accounting as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--n", help="comma-separated vector lengths (default: the model's)")
    s.add_argument("--figure", help="plot sizes against n to this image file")
    s.set_defaults(func=cmd_sizes)

    s = sub.add_parser("serve", help="run the challenge/attest HTTP service")
    s.add_argument("--model", required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8080)
    s.add_argument("--ttl", type=float, default=120.0)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ZkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
