"""Frolov generator matrices: construction, validation, scaling, persistence."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .polynomial import RootSet, chebyshev_roots, frolov_poly, real_roots

CONSTRUCTIONS = ("frolov-poly", "chebyshev")


@dataclass(frozen=True)
class ValidationReport:
    """Numerical evidence for the Frolov conditions.

    ``min_product`` is exhaustive over ``0 < ||m||_inf <= R``. The box test
    for the lattice-count condition is a random spot check, not a proof.
    """

    R: int
    min_product: float
    argmin: tuple[int, ...]
    box_trials: int
    max_excess: float

    @property
    def passed(self) -> bool:
        return self.min_product >= 1 - 1e-9 and self.max_excess <= 0

    def to_dict(self):
        return {"R": self.R, "min_product": self.min_product,
                "box_trials": self.box_trials, "max_excess": self.max_excess}


@dataclass(frozen=True, eq=False)
class FrolovMatrix:
    B: np.ndarray
    roots: tuple[float, ...]
    construction: str
    polynomial: tuple[int, ...] | None = None
    validation: ValidationReport | None = None
    det_abs: float = field(init=False)
    col_norm1: float = field(init=False)

    def __post_init__(self):
        B = np.array(self.B, dtype=float)
        B.setflags(write=False)
        object.__setattr__(self, "B", B)
        # Vandermonde determinant, product of root gaps
        z = self.roots
        det = 1.0
        for i in range(len(z)):
            for j in range(i + 1, len(z)):
                det *= z[j] - z[i]
        object.__setattr__(self, "det_abs", abs(det))
        object.__setattr__(self, "col_norm1", float(np.abs(B).sum(axis=0).max()))

    @property
    def d(self) -> int:
        return self.B.shape[0]

    def with_validation(self, report: ValidationReport) -> "FrolovMatrix":
        return FrolovMatrix(self.B, self.roots, self.construction, self.polynomial, report)


@dataclass(frozen=True, eq=False)
class ScaledMatrix:
    """``S = n^(1/d) diag(u) B`` with its inverse transpose cached."""

    S: np.ndarray
    S_invT: np.ndarray
    det_abs: float
    n: float
    u: np.ndarray
    base: FrolovMatrix

    @property
    def d(self) -> int:
        return self.S.shape[0]


def build(roots: RootSet | tuple | list, construction: str = "frolov-poly",
          polynomial=None) -> FrolovMatrix:
    """Vandermonde matrix ``B[i, j] = roots[i] ** j``."""
    z = tuple(float(r) for r in (roots.roots if isinstance(roots, RootSet) else roots))
    d = len(z)
    if d == 0:
        raise ValueError("need at least one root")
    B = np.array([[zi ** j for j in range(d)] for zi in z], dtype=float)
    zs = sorted(z)
    spread = 1.0 + max(abs(t) for t in z)
    if d > 1 and min(b - a for a, b in zip(zs, zs[1:])) < 1e-12 * spread:
        raise ValueError("near-singular generator matrix; roots are not distinct")
    return FrolovMatrix(B, z, construction, polynomial)


def frolov_matrix(d: int, construction: str = "frolov-poly") -> FrolovMatrix:
    """Unvalidated generator matrix for dimension ``d``."""
    if construction == "frolov-poly":
        p = frolov_poly(d)
        return build(real_roots(p), construction, p.coeffs)
    if construction == "chebyshev":
        return build(chebyshev_roots(d), construction)
    raise ValueError(f"unknown construction {construction!r}; choose from {CONSTRUCTIONS}")


def default_radius(d: int) -> int:
    return 50 if d <= 3 else 10


def count_in_box(B, lo, hi, slack=1e-12, cap=10**9) -> int:
    """Number of lattice points ``B m`` in the closed box ``[lo, hi]`` (+ slack)."""
    B = np.asarray(B, dtype=float)
    lo = np.asarray(lo, dtype=float) - slack
    hi = np.asarray(hi, dtype=float) + slack
    zero = np.zeros(B.shape[0])
    mlo, mhi = _kernels.index_bounds(np.linalg.inv(B), lo, hi, zero)
    if np.prod((mhi - mlo + 1).astype(float)) > cap:
        raise ValueError("box too large for exhaustive counting")
    m = _kernels.box_points(B, zero, lo, hi, mlo, mhi)
    if m.size == 0:
        return 0
    y = m.astype(float) @ B.T
    return int(np.count_nonzero(np.all((y >= lo) & (y <= hi), axis=1)))


def validate(fm: FrolovMatrix, R: int | None = None, trials: int = 100,
             rng: np.random.Generator | None = None,
             max_head_candidates: int = 200_000) -> ValidationReport:
    """Check the hyperbolic-cross and box-count conditions numerically."""
    d = fm.d
    R = default_radius(d) if R is None else int(R)
    if R < 1:
        raise ValueError("search radius must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng
    B = fm.B
    min_prod, arg = _kernels.min_abs_product(B, R)

    Binv = np.linalg.inv(B)
    vmin, vmax = 0.1, 10.0 * R ** d
    tested = 0
    worst = -math.inf
    attempts = 0
    while tested < trials and attempts < 50 * max(trials, 1):
        attempts += 1
        vol = math.exp(rng.uniform(math.log(vmin), math.log(vmax)))
        shape = rng.normal(0.0, 1.5, size=d)
        shape -= shape.mean()
        sides = vol ** (1.0 / d) * np.exp(shape)
        center = rng.uniform(-R, R, size=d)
        lo, hi = center - sides / 2, center + sides / 2
        mlo, mhi = _kernels.index_bounds(Binv, lo - 1e-12, hi + 1e-12, np.zeros(d))
        heads = np.prod((mhi - mlo + 1)[:-1].astype(float)) if d > 1 else 1.0
        if heads > max_head_candidates:
            continue
        count = count_in_box(B, lo, hi)
        worst = max(worst, count - float(np.prod(sides)) - 1.0)
        tested += 1
    if tested == 0:
        worst = 0.0
    return ValidationReport(R, float(min_prod), tuple(int(x) for x in arg), tested, float(worst))


def scale(fm: FrolovMatrix, n: float, u=None) -> ScaledMatrix:
    d = fm.d
    if not n > 0:
        raise ValueError(f"scale n must be positive, got {n}")
    u = np.ones(d) if u is None else np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (d,):
        raise ValueError(f"dilation must have {d} entries")
    if np.any(u <= 0):
        raise ValueError("dilation entries must be positive")
    S = n ** (1.0 / d) * (u[:, None] * fm.B)
    S_invT = np.linalg.inv(S).T
    det = n * float(np.prod(u)) * fm.det_abs
    S.setflags(write=False)
    S_invT.setflags(write=False)
    u = u.copy()
    u.setflags(write=False)
    return ScaledMatrix(S, S_invT, det, float(n), u, fm)


# --- persistence -------------------------------------------------------------

_TOKEN = "__f17__"


def _mark(obj):
    if isinstance(obj, float):
        return f"{_TOKEN}{obj:.17g}"
    if isinstance(obj, dict):
        return {k: _mark(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark(v) for v in obj]
    return obj


def dumps_17(obj, **kw) -> str:
    """JSON with every float written to 17 significant digits."""
    text = json.dumps(_mark(obj), **kw)
    return re.sub(f'"{_TOKEN}([^"]*)"', r"\1", text)


def matrix_to_dict(fm: FrolovMatrix) -> dict:
    out = {
        "dimension": fm.d,
        "construction": fm.construction,
        "roots": [float(r) for r in fm.roots],
        "matrix": [[float(x) for x in row] for row in fm.B],
        "det_abs": fm.det_abs,
        "col_norm1": fm.col_norm1,
    }
    if fm.polynomial is not None:
        out["polynomial"] = list(fm.polynomial)
    if fm.validation is not None:
        out["validation"] = fm.validation.to_dict()
    return out


def save_matrix(fm: FrolovMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_17(matrix_to_dict(fm), indent=2))
        fh.write("\n")


def load_matrix(path) -> FrolovMatrix:
    with open(path) as fh:
        doc = json.load(fh)
    fm = FrolovMatrix(np.array(doc["matrix"], dtype=float), tuple(doc["roots"]),
                      doc["construction"], tuple(doc["polynomial"]) if "polynomial" in doc else None)
    v = doc.get("validation")
    if v is not None:
        fm = fm.with_validation(ValidationReport(int(v["R"]), float(v["min_product"]), (),
                                                 int(v["box_trials"]), float(v["max_excess"])))
    if fm.d != doc["dimension"]:
        raise ValueError("dimension field disagrees with matrix shape")
    return fm
