"""Command-line interface: ``frolov <subcommand> [options]``."""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import _kernels, corpus, harness
from .lattice import SupportBox, enumerate_nodes, node_bound
from .matrix import (CONSTRUCTIONS, dumps_17, frolov_matrix, load_matrix, matrix_to_dict,
                     save_matrix, scale, validate)
from .rule import MODES, QuadratureSpec, make_rng, q_value, randomized_estimate
from .spectral import fourier_error_series, in_Dn, weight_hr, weight_vs


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _n_grid(text: str) -> tuple[float, ...]:
    """``"4:12"`` for 2^4..2^12, or an explicit comma list."""
    if ":" in text:
        lo, hi = (int(x) for x in text.split(":"))
        return tuple(float(2 ** k) for k in range(lo, hi + 1))
    return _floats(text)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix(args):
    if getattr(args, "matrix_file", None):
        fm = load_matrix(args.matrix_file)
        if fm.d != args.dim:
            raise SystemExit(f"matrix file has dimension {fm.d}, expected {args.dim}")
        return fm
    return frolov_matrix(args.dim, args.construction)


def cmd_matrix(args):
    fm = frolov_matrix(args.dim, args.construction)
    fm = fm.with_validation(validate(fm, args.radius, args.trials, make_rng(args.seed)))
    if args.out:
        save_matrix(fm, args.out)
    else:
        sys.stdout.write(dumps_17(matrix_to_dict(fm), indent=2) + "\n")
    return 0 if fm.validation.passed else 1


def cmd_nodes(args):
    fm = _matrix(args)
    spec = QuadratureSpec(fm, args.n, args.u or None, args.v or None)
    nodes = enumerate_nodes(spec.scaled(), spec.v, SupportBox.unit(fm.d))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        d = fm.d
        w.writerow([f"m_{j + 1}" for j in range(d)] + [f"x_{j + 1}" for j in range(d)])
        for m, x in zip(nodes.m, nodes.x):
            w.writerow([int(a) for a in m] + [f"{b:.17g}" for b in x])
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_integrate(args):
    fm = _matrix(args)
    f = corpus.get(args.function, fm.d)
    if args.mode == "deterministic":
        res = q_value(QuadratureSpec(fm, args.n, args.u or None, args.v or None, args.transform), f)
    else:
        res = randomized_estimate(fm, args.n, f, make_rng(args.seed), args.mode,
                                  (args.v or None) if args.mode == "dilation" else None,
                                  args.transform)
    doc = {**res.to_dict(), "function": f.name, "exact_integral": f.exact_integral,
           "error": res.value - f.exact_integral}
    _emit(dumps_17(doc, indent=2) + "\n", args.out)
    return 0


def _config(args) -> harness.StudyConfig:
    return harness.StudyConfig(
        function=args.function, d=args.dim, construction=args.construction,
        n_grid=_n_grid(args.n_grid) if args.n_grid else (), mode=args.mode,
        trials=args.trials, seed=args.seed, u_grid=args.u_grid, transformed=args.transform,
        v=args.v or None, threads=args.threads, out=args.out)


def cmd_converge(args):
    cfg = _config(args)
    report = harness.run_study(cfg, _matrix(args))
    if args.out:
        stem = os.path.splitext(args.out)[0]
        report.save(stem)
    else:
        sys.stdout.write(report.to_csv())
        sys.stdout.write(report.to_json())
    return 0


def cmd_unbiased(args):
    args.mode = "dilation-shift"
    cfg = _config(args)
    rep = harness.run_unbiasedness_test(cfg, args.n, _matrix(args))
    _emit(dumps_17(rep.to_dict(), indent=2) + "\n", args.out)
    return 0 if rep.passed else 1


def cmd_variance(args):
    fm = _matrix(args)
    S = scale(fm, args.n, args.u or None)
    rep = harness.run_variance_identity_test(args.function, S, args.samples, args.seed,
                                             args.threads)
    _emit(dumps_17(rep.to_dict(), indent=2) + "\n", args.out)
    return 0 if rep.passed else 1


def cmd_diagnose(args):
    fm = _matrix(args)
    d = fm.d
    rep = validate(fm, args.radius, args.trials, make_rng(args.seed))
    S = scale(fm, args.n)
    R = args.radius
    side = np.arange(-R, R + 1)
    m = np.stack(np.meshgrid(*([side] * d), indexing="ij"), -1).reshape(-1, d)
    m = m[np.any(m != 0, axis=1)]
    y = m.astype(float) @ S.S.T
    inside = in_Dn(y, args.n * (1 - 1e-9))
    nodes = enumerate_nodes(S, None, SupportBox.unit(d))
    doc = {
        "backend": _kernels.BACKEND,
        "dimension": d,
        "construction": fm.construction,
        "det_abs": fm.det_abs,
        "col_norm1": fm.col_norm1,
        "validation": {**rep.to_dict(), "passed": rep.passed},
        "n": args.n,
        "dual_points_outside_Dn": int(np.count_nonzero(~inside)),
        "node_count": len(nodes),
        "node_bound": node_bound(1.0, fm.col_norm1, args.n ** (1.0 / d), d),
    }
    f = corpus.get(args.function, d)
    if f.fourier is not None:
        ser = fourier_error_series(S, None, f.fourier)
        q = q_value(QuadratureSpec(fm, args.n), f)
        doc["series"] = {"function": f.name, "rule_error": q.value - f.exact_integral,
                         "real": ser.real, "imag_residual": ser.imag_residual,
                         "tail_bound": ser.tail_bound, "terms": ser.terms}
    pts = np.array([np.zeros(d), np.full(d, 0.5), np.ones(d)])
    s_iso = d // 2 + 1
    doc["weights"] = {"points": pts.tolist(), "h_1": weight_hr(pts, 1).tolist(),
                      f"v_{s_iso}": weight_vs(pts, s_iso).tolist()}
    _emit(dumps_17(doc, indent=2) + "\n", args.out)
    return 0 if rep.passed and doc["dual_points_outside_Dn"] == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=2)
    common.add_argument("--construction", choices=CONSTRUCTIONS, default="frolov-poly")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default=None, help="output file (stdout if omitted)")
    common.add_argument("--matrix-file", default=None, help="load B from a saved matrix JSON")

    p = argparse.ArgumentParser(prog="frolov", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("matrix", parents=[common], help="build and validate a generator matrix")
    s.add_argument("--radius", type=int, default=None)
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_matrix)

    def rule_args(s, with_function=True):
        s.add_argument("--n", type=float, default=64.0)
        s.add_argument("--u", type=_floats, default=None, help="dilation, comma separated")
        s.add_argument("--v", type=_floats, default=None, help="shift, comma separated")
        if with_function:
            s.add_argument("--function", default="tent")
            s.add_argument("--transform", action="store_true")

    s = sub.add_parser("nodes", parents=[common], help="dump the nodes in the unit cube as CSV")
    rule_args(s, with_function=False)
    s.set_defaults(func=cmd_nodes)

    s = sub.add_parser("integrate", parents=[common], help="one estimate as JSON")
    rule_args(s)
    s.add_argument("--mode", choices=("deterministic",) + MODES, default="deterministic")
    s.set_defaults(func=cmd_integrate)

    def study_args(s):
        s.add_argument("--function", default="tent")
        s.add_argument("--transform", action="store_true")
        s.add_argument("--n-grid", default=None, help='"lo:hi" for 2^lo..2^hi, or a list')
        s.add_argument("--trials", type=int, default=200)
        s.add_argument("--u-grid", type=int, default=None)
        s.add_argument("--v", type=_floats, default=None)

    s = sub.add_parser("converge", parents=[common], help="convergence study to CSV and JSON")
    study_args(s)
    s.add_argument("--mode", choices=harness.STUDY_MODES, default="deterministic")
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("unbiased", parents=[common], help="z-score test of the randomized rule")
    study_args(s)
    s.add_argument("--n", type=float, default=256.0)
    s.set_defaults(func=cmd_unbiased, trials=10_000)

    s = sub.add_parser("variance", parents=[common], help="shift variance against the series")
    s.add_argument("--function", default="tent")
    s.add_argument("--n", type=float, default=16.0)
    s.add_argument("--u", type=_floats, default=None)
    s.add_argument("--samples", type=int, default=100_000)
    s.set_defaults(func=cmd_variance)

    s = sub.add_parser("diagnose", parents=[common], help="matrix, lattice and backend summary")
    s.add_argument("--n", type=float, default=9.0)
    s.add_argument("--radius", type=int, default=20)
    s.add_argument("--function", default="tent")
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_diagnose)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"frolov: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
