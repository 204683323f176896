"""Convergence studies, statistical checks and report persistence."""
from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import corpus
from .matrix import FrolovMatrix, ScaledMatrix, dumps_17, frolov_matrix, scale
from .rule import MODES, QuadratureSpec, make_rng, q_value, randomized_estimate, sample_shift
from .spectral import SeriesTruncation, variance_series

STUDY_MODES = ("deterministic",) + MODES
CSV_COLUMNS = ("n", "mean_err", "rms_err", "max_err", "mean_nodes", "ci_half")


def dyadic_grid(d: int, lo: int = 4, hi: int | None = None) -> tuple[float, ...]:
    """``2^lo .. 2^hi``; the upper end defaults to 14 for d <= 2 and 10 otherwise."""
    hi = (14 if d <= 2 else 10) if hi is None else hi
    return tuple(float(2 ** k) for k in range(lo, hi + 1))


@dataclass(frozen=True)
class StudyConfig:
    function: str = "tent"
    d: int = 2
    construction: str = "frolov-poly"
    n_grid: tuple[float, ...] = ()
    mode: str = "deterministic"
    trials: int = 1
    seed: int = 0
    u_grid: int | None = None        # points per axis; None picks the default
    transformed: bool = False
    v: tuple[float, ...] | None = None
    threads: int = 1
    out: str | None = None

    def __post_init__(self):
        grid = tuple(float(x) for x in (self.n_grid or dyadic_grid(self.d)))
        object.__setattr__(self, "n_grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n grid must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mode not in STUDY_MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {STUDY_MODES}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["n_grid"] = list(self.n_grid)
        out["v"] = None if self.v is None else list(self.v)
        del out["out"]      # where the report goes is not part of its content
        return out


@dataclass(frozen=True)
class Row:
    n: float
    mean_err: float
    rms_err: float
    max_err: float
    mean_nodes: float
    ci_half: float

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    used: int
    loglog_slope: float | None = None     # coefficient of log n with log log n also fitted
    loglog_coef: float | None = None

    def to_dict(self):
        return asdict(self)


@dataclass
class ConvergenceReport:
    config: StudyConfig
    rows: list[Row]
    slopes: dict[str, SlopeFit | None]
    degenerate: bool
    node_bound: float                      # 2 (|B|_1 + 1)^d per unit n
    wall_clock: float = field(default=0.0, compare=False)

    def slope(self, metric: str = "rms_err") -> float | None:
        fit = self.slopes.get(metric)
        return None if fit is None else fit.slope

    def nodes_within_bound(self) -> bool:
        return all(r.mean_nodes <= self.node_bound * r.n for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": [dict(zip(CSV_COLUMNS, r.as_tuple())) for r in self.rows],
            "slopes": {k: (None if v is None else v.to_dict()) for k, v in self.slopes.items()},
            "degenerate": self.degenerate,
            "node_bound_per_n": self.node_bound,
            "nodes_within_bound": self.nodes_within_bound(),
        }

    def to_json(self) -> str:
        return dumps_17(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([f"{x:.17g}" for x in r.as_tuple()])
        return buf.getvalue()

    def save(self, stem: str) -> None:
        """Write ``stem.csv`` and ``stem.json``; wall-clock goes to ``stem.timing.json``
        so the two reports stay byte-identical across runs."""
        with open(stem + ".csv", "w") as fh:
            fh.write(self.to_csv())
        with open(stem + ".json", "w") as fh:
            fh.write(self.to_json())
        with open(stem + ".timing.json", "w") as fh:
            json.dump({"wall_clock_s": self.wall_clock}, fh)
            fh.write("\n")


# --- fitting -------------------------------------------------------------------

def fit_slope(n, err, loglog: bool = True) -> SlopeFit:
    """Least squares of ``log err`` on ``log n``; optionally also on ``log log n``."""
    n = np.asarray(n, dtype=float)
    err = np.asarray(err, dtype=float)
    ok = err > 0
    if not np.all(ok):
        warnings.warn(f"excluding {int(np.sum(~ok))} nonpositive error values from the fit")
    n, err = n[ok], err[ok]
    if n.size < 4:
        raise ValueError("need at least 4 rows with positive error")
    x = np.log(n)
    y = np.log(err)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    fit = SlopeFit(float(coef[0]), float(coef[1]), resid, int(n.size))
    if loglog and np.all(n > 1):
        A2 = np.column_stack([x, np.log(x), np.ones_like(x)])
        c2, *_ = np.linalg.lstsq(A2, y, rcond=None)
        fit = SlopeFit(fit.slope, fit.intercept, fit.residual, fit.used, float(c2[0]), float(c2[1]))
    return fit


def _fit_metrics(rows: list[Row]) -> tuple[dict, bool]:
    n = [r.n for r in rows]
    slopes = {}
    degenerate = True
    for metric in ("mean_err", "rms_err", "max_err"):
        err = np.array([getattr(r, metric) for r in rows])
        if np.any(err > 0):
            degenerate = False
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                slopes[metric] = fit_slope(n, err)
        except ValueError:
            slopes[metric] = None
    return slopes, degenerate


# --- studies -------------------------------------------------------------------

def _setup(cfg: StudyConfig, fm: FrolovMatrix | None):
    fm = frolov_matrix(cfg.d, cfg.construction) if fm is None else fm
    if fm.d != cfg.d:
        raise ValueError("matrix dimension disagrees with the config")
    f = corpus.get(cfg.function, cfg.d)
    if not f.boundary_vanishing and not cfg.transformed:
        raise ValueError(f"{f.name} needs the transformed rule")
    return fm, f


def _node_bound(fm: FrolovMatrix) -> float:
    return 2.0 * (fm.col_norm1 + 1.0) ** fm.d


def _pmap(fn, items, threads: int):
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def u_grid(d: int, per_axis: int | None = None) -> np.ndarray:
    """Tensor grid in ``[1, 2^(1/d)]^d``, about ``16^min(d, 2)`` points by default."""
    if per_axis is None:
        per_axis = max(2, int(math.floor(16.0 ** (min(d, 2) / d) + 1e-9)))
    side = np.linspace(1.0, 2.0 ** (1.0 / d), per_axis)
    return np.stack(np.meshgrid(*([side] * d), indexing="ij"), -1).reshape(-1, d)


def run_deterministic_study(cfg: StudyConfig, fm: FrolovMatrix | None = None) -> ConvergenceReport:
    """Deterministic error per ``n`` plus the maximum over a grid of dilations.

    ``mean_err`` and ``rms_err`` hold the error of the undilated rule. The
    grid maximum is a lower bound for the supremum over all dilations.
    """
    t0 = time.perf_counter()
    fm, f = _setup(cfg, fm)
    I = f.exact_integral
    grid = u_grid(cfg.d, cfg.u_grid)
    v = None if cfg.v is None else np.asarray(cfg.v, dtype=float)

    def one(n):
        base = q_value(QuadratureSpec(fm, n, None, v, cfg.transformed), f)
        e0 = abs(base.value - I)
        worst = e0
        for u in grid:
            r = q_value(QuadratureSpec(fm, n, u, v, cfg.transformed), f)
            worst = max(worst, abs(r.value - I))
        return Row(n, e0, e0, worst, float(base.node_count), 0.0)

    rows = _pmap(one, cfg.n_grid, cfg.threads)
    slopes, degenerate = _fit_metrics(rows)
    return ConvergenceReport(cfg, rows, slopes, degenerate, _node_bound(fm),
                             time.perf_counter() - t0)


def _trial_errors(cfg: StudyConfig, fm, f, n: float, offset: int):
    v = None if cfg.v is None else np.asarray(cfg.v, dtype=float)
    errs = np.empty(cfg.trials)
    nodes = np.empty(cfg.trials)
    for t in range(cfg.trials):
        rng = make_rng(cfg.seed, offset + t)
        r = randomized_estimate(fm, n, f, rng, cfg.mode, v if cfg.mode == "dilation" else None,
                                cfg.transformed)
        errs[t] = r.value - f.exact_integral
        nodes[t] = r.node_count
    return errs, nodes


def run_randomized_study(cfg: StudyConfig, fm: FrolovMatrix | None = None) -> ConvergenceReport:
    """Mean absolute, RMS and maximum error over independent random trials.

    Trial ``t`` at grid position ``k`` uses the stream ``(seed, k * trials + t)``.
    ``ci_half`` is the 95% normal half-width for the mean absolute error.
    """
    if cfg.mode == "deterministic":
        raise ValueError("use run_deterministic_study for mode 'deterministic'")
    t0 = time.perf_counter()
    fm, f = _setup(cfg, fm)

    def one(item):
        k, n = item
        errs, nodes = _trial_errors(cfg, fm, f, n, k * cfg.trials)
        a = np.abs(errs)
        ci = 1.96 * float(np.std(a, ddof=1)) / math.sqrt(a.size) if a.size > 1 else 0.0
        return Row(n, float(np.mean(a)), float(np.sqrt(np.mean(errs ** 2))), float(a.max()),
                   float(np.mean(nodes)), ci)

    rows = _pmap(one, list(enumerate(cfg.n_grid)), cfg.threads)
    slopes, degenerate = _fit_metrics(rows)
    return ConvergenceReport(cfg, rows, slopes, degenerate, _node_bound(fm),
                             time.perf_counter() - t0)


def run_study(cfg: StudyConfig, fm: FrolovMatrix | None = None) -> ConvergenceReport:
    if cfg.mode == "deterministic":
        return run_deterministic_study(cfg, fm)
    return run_randomized_study(cfg, fm)


def bound_sanity(report: ConvergenceReport, r: float, factor: float = 10.0) -> bool:
    """``max_err(n) n^r (log n)^(-(d-1)/2)`` stays within ``factor`` times its median."""
    d = report.config.d
    vals = np.array([row.max_err * row.n ** r * math.log(row.n) ** (-(d - 1) / 2)
                     for row in report.rows])
    med = float(np.median(vals))
    return bool(np.all(vals <= factor * med))


# --- statistical checks ----------------------------------------------------------

@dataclass(frozen=True)
class UnbiasednessReport:
    mean_error: float
    std: float
    trials: int
    z: float | None
    degenerate: bool

    @property
    def passed(self) -> bool:
        return self.degenerate or (self.z is not None and self.z <= 4.0)

    def to_dict(self):
        return {**asdict(self), "passed": self.passed}


def run_unbiasedness_test(cfg: StudyConfig, n: float | None = None,
                          fm: FrolovMatrix | None = None) -> UnbiasednessReport:
    """z-score of the mean error over ``cfg.trials`` dilated and shifted estimates."""
    if cfg.mode != "dilation-shift":
        raise ValueError("unbiasedness needs mode 'dilation-shift'")
    fm, f = _setup(cfg, fm)
    n = cfg.n_grid[0] if n is None else n
    M = cfg.trials
    chunks = [(s, min(s + 1000, M)) for s in range(0, M, 1000)]

    def one(c):
        sub = replace(cfg, n_grid=(n,), trials=c[1] - c[0])
        return _trial_errors(sub, fm, f, n, c[0])[0]

    errs = np.concatenate(_pmap(one, chunks, cfg.threads))
    mean = math.fsum(errs) / M
    std = float(np.std(errs, ddof=1)) if M > 1 else 0.0
    if std == 0.0:
        return UnbiasednessReport(mean, 0.0, M, None, True)
    return UnbiasednessReport(mean, std, M, abs(mean) * math.sqrt(M) / std, False)


@dataclass(frozen=True)
class VarianceReport:
    mc_variance: float
    series: float
    tail_bound: float
    relative_gap: float | None
    samples: int
    tolerance: float = 0.05
    abs_floor: float = 1e-20

    @property
    def passed(self) -> bool:
        slack = self.tolerance * self.series + self.tail_bound + self.abs_floor
        return abs(self.mc_variance - self.series) <= slack

    def to_dict(self):
        return {**asdict(self), "passed": self.passed}


def run_variance_identity_test(function: str, S: ScaledMatrix, samples: int = 100_000,
                               seed: int = 0, threads: int = 1,
                               trunc: SeriesTruncation | None = None) -> VarianceReport:
    """Monte Carlo mean of ``(Q_S^V - I)^2`` over uniform shifts against the series.

    The rule is unbiased in the shift, so the mean square is the variance.
    """
    d = S.d
    f = corpus.get(function, d)
    if f.fourier is None:
        raise ValueError(f"{f.name} has no Fourier transform attached")
    chunks = [(s, min(s + 5000, samples)) for s in range(0, samples, 5000)]

    def one(c):
        out = np.empty(c[1] - c[0])
        for i, t in enumerate(range(*c)):
            v = sample_shift(make_rng(seed, t), d)
            out[i] = q_value(QuadratureSpec(S.base, S.n, S.u, v), f).value - f.exact_integral
        return out

    errs = np.concatenate(_pmap(one, chunks, threads))
    mc = math.fsum(errs ** 2) / samples
    ser = variance_series(S, f.fourier, trunc)
    gap = abs(mc - ser.real) / ser.real if ser.real > 0 else None
    return VarianceReport(mc, ser.real, ser.tail_bound, gap, samples)


def scaled_for(d: int, n: float, u=None, construction: str = "frolov-poly") -> ScaledMatrix:
    return scale(frolov_matrix(d, construction), n, u)
