"""Command-line front end.

Exit codes: 0 success, 2 bad input or usage, 3 estimation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import curvegeom, embedding, recovery, signals
from .errors import EstimationError, InvalidSpec, NoGroundTruth, PreconditionError, SampleCurveError


def _load_signal(text: str) -> signals.PeriodicSignal:
    text = text.strip()
    if not text.startswith("{"):
        path = Path(text)
        if not path.exists():
            raise InvalidSpec(f"signal spec {text!r} is neither inline JSON nor an existing file")
        text = path.read_text()
    return signals.signal_from_json(text)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _params(args) -> recovery.PipelineParams:
    kw = {}
    for name in ("k", "theta", "length_jump_factor", "matching_tolerance", "violation_budget",
                 "n_iter", "max_residual", "min_coverage"):
        value = getattr(args, name, None)
        if value is not None:
            kw[name] = value
    return recovery.PipelineParams(**kw)


def _cloud(args) -> embedding.TrainCloud:
    if getattr(args, "input", None):
        return embedding.read_cloud_csv(args.input)
    if not getattr(args, "signal", None):
        raise InvalidSpec("give either --input <cloud.csv> or --signal <spec>")
    sig = _load_signal(args.signal)
    return embedding.sample_cloud(sig, embedding.TrainConfig(args.d, args.tau), args.M, args.scheme, args.seed)


def _add_cloud_source(p, default_d=3):
    p.add_argument("--input", help="train cloud CSV")
    p.add_argument("--signal", help="signal spec: inline JSON or path to a JSON file")
    p.add_argument("--d", type=int, default=default_d, help="train length when sampling from --signal")
    p.add_argument("--tau", type=float, default=0.2, help="sampling period in seconds")
    p.add_argument("--M", type=int, default=2000, help="number of trains")
    p.add_argument("--scheme", choices=embedding.SCHEMES, default="uniform_random")


def _add_common(p):
    p.add_argument("--output", help="write the result here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="emit JSON")


def _add_pipeline(p):
    p.add_argument("--k", type=int, help="neighbour count of the covering test (default 12)")
    p.add_argument("--theta", type=float, help="PCA ratio threshold of the covering test (default 0.3)")
    p.add_argument("--length-jump-factor", type=float)
    p.add_argument("--matching-tolerance", type=float)
    p.add_argument("--violation-budget", type=float)
    p.add_argument("--n-iter", type=int, help="lift iterations for the rotation number (default 10^4)")
    p.add_argument("--max-residual", type=float)


# -- subcommands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    if not args.signal:
        raise InvalidSpec("generate needs --signal")
    cloud = _cloud(args)
    _emit(embedding.format_cloud_csv(cloud, with_times=args.with_times), args.output)
    return 0


def cmd_check_covering(args) -> int:
    cloud = _cloud(args)
    verdict = curvegeom.covering_test(cloud, args.k or curvegeom.DEFAULT_K, args.theta or curvegeom.DEFAULT_THETA)
    doc = verdict.to_dict()
    doc["d"], doc["tau"], doc["M"] = cloud.d, cloud.tau, len(cloud)
    _emit(_dump(doc), args.output)
    return 0


def _oracle_columns(args, rho: float, tau: float, selected):
    if not args.signal:
        raise NoGroundTruth("--with-oracle needs --signal to know the true period")
    T = _load_signal(args.signal).period_T
    ratio = (tau / T) % 1.0
    doc = {"true_T": T, "true_rho": ratio,
           "rho_error": min(abs(rho - ratio), abs(1.0 - rho - ratio))}
    if selected is not None:
        doc["relative_T_error"] = abs(selected - T) / T
    return doc


def cmd_estimate_period(args) -> int:
    cloud = _cloud(args)
    band = None if args.band_unknown else args.band_index
    est = recovery.estimate_period(cloud, band, _params(args))
    doc = est.to_dict()
    if args.with_oracle:
        doc["oracle"] = _oracle_columns(args, est.rho.rho, cloud.tau, est.selected_T)
    _emit(_dump(doc), args.output)
    return 0


def cmd_reconstruct(args) -> int:
    cloud = _cloud(args)
    params = _params(args)
    kw = {"min_coverage": args.min_coverage} if args.min_coverage is not None else {}
    params = recovery.PipelineParams(**{**params.to_dict(), **kw})
    model = recovery.fit_curve_model(cloud, params)
    T = args.period
    if T is None:
        T = recovery.estimate_period(cloud, 0, params, model=model).selected_T
    rec = recovery.reconstruct_signal(cloud, T, args.grid, args.n_orbit, params, model=model)
    if args.reference:
        ref = recovery.reference_on_grid(_load_signal(args.reference), args.grid, T)
        rec = recovery.Reconstruction(rec.period_T, rec.phases, rec.values, rec.counts, rec.coverage,
                                      recovery.align_and_rmse(rec, ref), rec.diagnostics)
    if args.csv_output:
        Path(args.csv_output).write_text(rec.to_csv())
    if args.json or args.reference:
        _emit(_dump(rec.to_dict()), args.output)
    else:
        _emit(rec.to_csv(), args.output)
    return 0


def _failure(fn):
    try:
        return fn(), None
    except SampleCurveError as exc:
        return None, {"error": type(exc).__name__, "message": str(exc)}


def cmd_counterexample(args) -> int:
    warp = signals.WarpSpec(args.q, args.p)
    s = signals.make_sine()
    s_warped = signals.make_warped(s, warp)
    if args.tau is not None:
        tau = args.tau
    else:
        tau = (args.p or 1) / args.q
    cfg = embedding.TrainConfig(args.d, tau)
    cloud_s = embedding.sample_cloud(s, cfg, args.M, args.scheme, args.seed)
    cloud_w = embedding.sample_cloud(s_warped, cfg, args.M, args.scheme, args.seed)
    gap = max(curvegeom.max_nn_gap(cloud_s), curvegeom.max_nn_gap(cloud_w))
    hd = curvegeom.hausdorff_distance(cloud_s, cloud_w)
    rmse, delta = signals.min_shift_rmse(s, s_warped, 1e-3)
    t = np.linspace(0.0, 1.0, 10_001)
    dr = 1.0 + np.cos(2 * np.pi * args.q * t) / 2.0

    params = _params(args)
    cfg1 = embedding.TrainConfig(args.d + 1, tau)
    report = {
        "q": args.q, "p": args.p, "tau": tau, "d": args.d, "M": args.M, "scheme": args.scheme,
        "warp_min_derivative": float(dr.min()),
        "hausdorff_distance": hd,
        "max_nn_gap": gap,
        "hausdorff_over_gap": hd / gap if gap > 0 else math.inf,
        "signal_min_shift_rmse": rmse,
        "signal_best_shift": delta,
        "parameters": params.to_dict(),
    }
    for name, sig in (("sine", s), ("warped", s_warped)):
        cloud = embedding.sample_cloud(sig, cfg1, args.M, args.scheme, args.seed)
        est, err = _failure(lambda: recovery.estimate_period(cloud, 0, params))
        report[f"{name}_period"] = est.to_dict() if est else err
        rec, err = _failure(lambda: recovery.reconstruct_signal(cloud, 1.0, args.grid, args.n_orbit, params))
        report[f"{name}_reconstruction"] = (
            {"outcome": "reconstructed", "coverage": rec.coverage} if rec else {"outcome": "failed", **err}
        )
    _emit(_dump(report), args.output)
    return 0


BENCH_COLUMNS = ("signal", "M", "d", "tau_over_T", "n_iter", "relative_T_error", "rho_residual", "runtime_s", "error")


def _bench_cell(job):
    sig_doc, M, d, ratio, n_iter, seed = job
    sig = signals.signal_from_dict(sig_doc)
    T = sig.period_T
    tau = ratio * T
    row = {"signal": sig.kind, "M": M, "d": d, "tau_over_T": ratio, "n_iter": n_iter,
           "relative_T_error": "", "rho_residual": "", "runtime_s": "", "error": ""}
    start = time.perf_counter()
    try:
        cloud = embedding.sample_cloud(sig, embedding.TrainConfig(d, tau), M, "uniform_random", seed)
        band = int(math.floor(2.0 * ratio))
        est = recovery.estimate_period(cloud, band, recovery.PipelineParams(n_iter=n_iter))
        row["relative_T_error"] = abs(est.selected_T - T) / T
        row["rho_residual"] = est.rho.residual
    except SampleCurveError as exc:
        row["error"] = type(exc).__name__
    row["runtime_s"] = round(time.perf_counter() - start, 4)
    return row


def run_benchmark(sig, Ms, ds, ratios, n_iters, seed=0, jobs=1) -> list[dict]:
    grid = [(sig.to_dict(), M, d, r, n, seed) for M in Ms for d in ds for r in ratios for n in n_iters]
    if not grid:
        raise InvalidSpec("benchmark sweep grid is empty")
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_bench_cell, grid))
    return [_bench_cell(job) for job in grid]


def format_benchmark_csv(rows) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def cmd_benchmark(args) -> int:
    sig = _load_signal(args.signal) if args.signal else signals.make_sine()
    rows = run_benchmark(sig, args.M, args.d, args.ratio, args.n_iter, args.seed, args.jobs)
    if args.json:
        _emit(_dump(rows), args.output)
    else:
        _emit(format_benchmark_csv(rows), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samplecurve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a train cloud from a signal and write it as CSV")
    _add_cloud_source(p)
    _add_common(p)
    p.add_argument("--with-times", action="store_true", help="export hidden start times (t=<float> column)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check-covering", help="test whether a cloud traces a simple closed curve")
    _add_cloud_source(p, default_d=2)
    _add_common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--theta", type=float)
    p.set_defaults(func=cmd_check_covering)

    p = sub.add_parser("estimate-period", help="recover the signal period from a (d+1)-train cloud")
    _add_cloud_source(p)
    _add_common(p)
    _add_pipeline(p)
    p.add_argument("--band-index", type=int, default=0,
                   help="n with tau in (nT/2, (n+1)T/2); 0 means tau < T/2")
    p.add_argument("--band-unknown", action="store_true", help="list candidate periods without selecting one")
    p.add_argument("--with-oracle", action="store_true", help="add true-period columns (needs --signal)")
    p.set_defaults(func=cmd_estimate_period)

    p = sub.add_parser("reconstruct", help="recover the signal up to a time shift")
    _add_cloud_source(p, default_d=4)
    _add_common(p)
    _add_pipeline(p)
    p.add_argument("--period", type=float, help="known period; estimated with band 0 when omitted")
    p.add_argument("--grid", type=int, default=128, help="number of phase bins G")
    p.add_argument("--n-orbit", type=int, default=100_000)
    p.add_argument("--min-coverage", type=float)
    p.add_argument("--reference", help="reference signal spec for alignment and RMSE")
    p.add_argument("--csv-output", help="also write (phase, value) CSV here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("counterexample", help="two signals with the same train curve but no time shift between them")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--tau", type=float, help="sampling period (default p/q)")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--M", type=int, default=5000)
    p.add_argument("--scheme", choices=embedding.SCHEMES, default="uniform_grid")
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--n-orbit", type=int, default=100_000)
    _add_common(p)
    _add_pipeline(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("benchmark", help="sweep period-estimation error over a parameter grid")
    p.add_argument("--signal", help="signal spec (default: unit sine)")
    p.add_argument("--M", type=int, nargs="*", default=[500, 2000, 8000])
    p.add_argument("--d", type=int, nargs="*", default=[3])
    p.add_argument("--ratio", type=float, nargs="*", default=[0.2], help="tau/T values")
    p.add_argument("--n-iter", type=int, nargs="*", default=[10_000])
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"estimation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
