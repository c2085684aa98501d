"""Command-line interface.

Exit status: 0 on success, 1 on usage errors, 2 on data or contract errors.
Unless ``--seed`` is given, seeds default to ``$TTS_SEED`` (or 0).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from . import baselines, harness, oracle, predictors
from .estimator import EstimatorConfig, PredictorError, heavy_labels, run_step
from .graph import EdgeStream, StreamError, preprocess, read_stream, write_stream

COMMANDS = (
    "preprocess", "exact", "weights", "estimate", "trials", "match-p",
    "predict-build", "correlate", "split", "gen", "augment",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def default_seed() -> int:
    return int(os.environ.get("TTS_SEED", "0"))


def load(args) -> EdgeStream:
    raw = read_stream(args.input)
    clean, report = preprocess(raw)
    if getattr(args, "skip_preprocess", False):
        if not (report.is_clean() and clean.equals(raw)):
            raise StreamError(f"{args.input} is not preprocessed: {report}")
        return raw
    return clean


def _emit(args, payload, rows=None):
    """Write ``payload`` as JSON, or ``rows`` as CSV with ``--format csv``."""
    out = open(args.out, "w") if getattr(args, "out", None) else sys.stdout
    try:
        if getattr(args, "format", "json") == "csv" and rows is not None:
            csv.writer(out, lineterminator="\n").writerows(rows)
        else:
            out.write(json.dumps(payload) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def parse_predictor(text: str, s: EdgeStream, delta: int, seed: int) -> predictors.PredictorSpec:
    """Build a predictor from ``perfect:K``, ``mindeg:K``, ``static:K``,
    ``hybrid:K``, ``threshold:ZETA``, ``noisy:K:ALPHA`` or ``never``.

    ``K`` may be a count or a fraction of the stream size below 1.
    """
    name, *rest = text.split(":")
    if name not in predictors.KINDS:
        raise UsageError(f"unknown predictor {text!r}")
    expected = {"never": 0, "threshold": 1, "noisy": 2}.get(name, 1)
    if len(rest) != expected:
        raise UsageError(f"predictor {name!r} takes {expected} parameter(s): {text!r}")
    if name == "never":
        return predictors.NEVER
    if name == "threshold":
        return predictors.build_threshold(s, delta, float(rest[0]))
    K = _parse_k(rest[0], s.m)
    if name == "perfect":
        return predictors.build_perfect(oracle.edge_weights(s, delta), K)
    if name == "mindeg":
        return predictors.build_min_degree(s, delta, K)[0]
    if name == "static":
        return predictors.build_static(s, K)
    if name == "hybrid":
        return predictors.build_hybrid(s, delta, K)
    ranked = predictors.rank_edges(s.idx, oracle.edge_weights(s, delta).total)
    return predictors.apply_noise(ranked, K, int(rest[1]), np.random.default_rng(seed))


def _parse_k(tok: str, m: int) -> int:
    try:
        val = float(tok)
    except ValueError:
        raise UsageError(f"bad K {tok!r}") from None
    if 0 < val < 1:
        return int(round(val * m))
    if val != int(val) or val < 0:
        raise UsageError(f"bad K {tok!r}")
    return int(val)


def cmd_preprocess(args):
    clean, report = preprocess(read_stream(args.input))
    payload = {"schema": harness.SCHEMA_VERSION, **report.__dict__}
    if args.out:
        write_stream(clean, args.out)
        print(json.dumps(payload))
    else:
        write_stream(clean, sys.stdout)
        print(json.dumps(payload), file=sys.stderr)


def cmd_exact(args):
    counts = oracle.enumerate_exact(load(args), args.delta)
    payload = {"schema": harness.SCHEMA_VERSION, "kinds": counts.tolist(), "total": int(counts.sum())}
    rows = [("kind", "count")] + [(k.name, int(counts[k])) for k in oracle.TriangleKind]
    _emit(args, payload, rows)


def cmd_weights(args):
    w = oracle.edge_weights(load(args), args.delta)
    table = np.column_stack([w.idx, w.total, w.per_kind])
    with open(args.out, "w") as fh:
        np.savetxt(fh, table, fmt="%d")


def cmd_estimate(args):
    s = load(args)
    spec = parse_predictor(args.predictor, s, args.delta, args.seed)
    labels = heavy_labels(spec, s, args.delta)
    lines, rows = [], [("run", "seed", *[k.name for k in oracle.TriangleKind], "peak_live_edges", "peak_heavy")]
    for r in range(args.runs):
        seed = args.seed + r
        est, stats = run_step(s, EstimatorConfig(args.delta, args.p, seed, spec), labels=labels)
        rec = {"schema": harness.SCHEMA_VERSION, "seed": seed, "estimates": est.tolist(), **stats.to_dict()}
        if args.no_timing:
            del rec["elapsed_ms"]
        lines.append(rec)
        rows.append((r, seed, *est.tolist(), stats.peak_live_edges, stats.peak_heavy))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.format == "csv":
            csv.writer(out, lineterminator="\n").writerows(rows)
        else:
            for rec in lines:
                out.write(json.dumps(rec) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_trials(args):
    s = load(args)
    spec = parse_predictor(args.predictor, s, args.delta, args.seed)
    report = harness.run_trials(s, EstimatorConfig(args.delta, args.p, args.seed, spec), args.runs)
    rows = [("kind", "exact", "mean_estimate", "mae", "std")] + [
        (k.kind, k.exact, k.mean_estimate, k.mae, k.std) for k in report.per_kind
    ]
    _emit(args, report.to_dict(), rows)


def cmd_match_p(args):
    print(f"{baselines.match_probability_frac(args.p, args.k_frac):.10g}")


def cmd_predict_build(args):
    s = load(args)
    spec = parse_predictor(args.spec, s, args.delta, args.seed)
    with open(args.out, "w") as fh:
        if spec.kind == "threshold":
            fh.write(f"threshold {spec.threshold:g}\n")
        else:
            np.savetxt(fh, spec.heavy_set if spec.heavy_set is not None else [], fmt="%d")


def cmd_correlate(args):
    s = load(args)
    K = _parse_k(args.k, s.m)
    ranked = predictors.rank_edges(s.idx, oracle.edge_weights(s, args.delta).total)
    if args.spec == "threshold":
        train, test = harness.split_stream(s, args.fraction)
        zeta = predictors.learn_threshold(train, args.delta, K)
        ranked = predictors.rank_edges(test.idx, oracle.edge_weights(test, args.delta).total)
        spec = predictors.build_threshold(test, args.delta, zeta)
    else:
        spec = parse_predictor(args.spec, s, args.delta, args.seed)
    rep = harness.correlation(ranked, spec.heavy_set, K)
    rows = [("jaccard", "v_metric", "k_perfect", "k_predicted"), (rep.jaccard, rep.v_metric, rep.k_perfect, rep.k_predicted)]
    _emit(args, {"schema": harness.SCHEMA_VERSION, **rep.__dict__}, rows)


def cmd_split(args):
    train, test = harness.split_stream(load(args), args.fraction)
    write_stream(train, args.train)
    write_stream(test, args.test)
    print(json.dumps({"schema": harness.SCHEMA_VERSION, "train_m": train.m, "test_m": test.m}))


def cmd_gen(args):
    s = harness.gen_random(args.n, args.m, args.horizon, args.seed, skew=args.skew)
    write_stream(s, args.out)


def cmd_augment(args):
    s = harness.augment_bipartite(
        load(args), args.seed, n_neighbors=args.neighbors, n_second=args.second, n_wedges=args.wedges
    )
    write_stream(s, args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tristream", description="Streaming estimation of temporal triangle counts.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def command(name, fn, help, stream=True, delta=False, seed=False, fmt=False, out=None):
        c = sub.add_parser(name, help=help)
        c.set_defaults(fn=fn)
        if stream:
            c.add_argument("--input", required=True)
            c.add_argument("--skip-preprocess", action="store_true", help="input is already clean")
        if delta:
            c.add_argument("--delta", type=int, required=True)
        if seed:
            c.add_argument("--seed", type=int, default=default_seed())
        if fmt:
            c.add_argument("--format", choices=("json", "csv"), default="json")
        if out is not None:
            c.add_argument("--out", required=out)
        return c

    c = sub.add_parser("preprocess", help="clean and relabel an edge list")
    c.set_defaults(fn=cmd_preprocess)
    c.add_argument("--input", required=True)
    c.add_argument("--out")

    command("exact", cmd_exact, "exact counts per kind", delta=True, fmt=True, out=False)
    command("weights", cmd_weights, "per-edge instance memberships", delta=True, out=True)

    c = command("estimate", cmd_estimate, "single-pass estimates", delta=True, seed=True, fmt=True, out=False)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--predictor", default="never")
    c.add_argument("--runs", type=int, default=1)
    c.add_argument("--no-timing", action="store_true", help="omit elapsed_ms for byte-stable output")

    c = command("trials", cmd_trials, "multi-seed error report", delta=True, seed=True, fmt=True, out=False)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--predictor", default="never")
    c.add_argument("--runs", type=int, default=10)

    c = sub.add_parser("match-p", help="memory-matched sampling probability")
    c.set_defaults(fn=cmd_match_p)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--k-frac", type=float, required=True)

    c = command("predict-build", cmd_predict_build, "materialise a predictor", delta=True, seed=True, out=True)
    c.add_argument("--spec", required=True)

    c = command("correlate", cmd_correlate, "agreement with the exact top-K", delta=True, seed=True, fmt=True, out=False)
    c.add_argument("--k", required=True)
    c.add_argument("--spec", default="mindeg:0.01", help="predictor, or 'threshold' for the train/test protocol")
    c.add_argument("--fraction", type=float, default=0.75)

    c = command("split", cmd_split, "train/test split by stream order")
    c.add_argument("--fraction", type=float, default=0.75)
    c.add_argument("--train", required=True)
    c.add_argument("--test", required=True)

    c = command("gen", cmd_gen, "random skewed stream", stream=False, seed=True, out=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--horizon", type=int, required=True)
    c.add_argument("--skew", type=float, default=1.0)

    c = command("augment", cmd_augment, "close sampled wedges into triangles", seed=True, out=True)
    c.add_argument("--neighbors", type=int, default=8)
    c.add_argument("--second", type=int, default=8)
    c.add_argument("--wedges", type=int, default=16)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.fn(args)
    except UsageError as exc:
        print(f"tristream: error: {exc}", file=sys.stderr)
        return 1
    except (StreamError, PredictorError, ValueError, OSError) as exc:
        print(f"tristream: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
