"""The quadrature rule ``Q_S^v`` and its randomized and transformed variants.

``Q_S^v(f) = |det S|^-1 sum_m f(S^-T (m + v))`` with ``S = n^(1/d) diag(u) B``.

Random streams: trial ``t`` under master seed ``s`` draws from a Philox
generator keyed by ``SeedSequence([s, t])``, so a trial's draws do not
depend on which worker runs it or in what order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import TestFunction
from .lattice import DEFAULT_CAP, SupportBox, enumerate_nodes
from .matrix import FrolovMatrix, ScaledMatrix, scale
from .transform import Psi, det_DPsi

MODES = ("dilation", "dilation-shift")


@dataclass(frozen=True, eq=False)
class QuadratureSpec:
    matrix: FrolovMatrix
    n: float
    u: np.ndarray | None = None
    v: np.ndarray | None = None
    transformed: bool = False

    def __post_init__(self):
        d = self.matrix.d
        if not self.n >= 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        u = np.ones(d) if self.u is None else np.asarray(self.u, dtype=float).reshape(-1)
        v = np.zeros(d) if self.v is None else np.asarray(self.v, dtype=float).reshape(-1)
        if u.shape != (d,) or v.shape != (d,):
            raise ValueError(f"u and v must have {d} entries")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def d(self) -> int:
        return self.matrix.d

    def scaled(self) -> ScaledMatrix:
        return scale(self.matrix, self.n, self.u)

    def to_dict(self) -> dict:
        return {"construction": self.matrix.construction, "d": self.d, "n": float(self.n),
                "u": [float(x) for x in self.u], "v": [float(x) for x in self.v],
                "transformed": self.transformed}


@dataclass(frozen=True, eq=False)
class EstimateResult:
    value: float
    node_count: int
    spec: QuadratureSpec = field(repr=False)

    def to_dict(self) -> dict:
        return {"value": self.value, "node_count": self.node_count, "spec": self.spec.to_dict()}


def _weighted_sum(values: np.ndarray, weight: float) -> float:
    return math.fsum(values) * weight


def q_value(spec: QuadratureSpec, f: TestFunction, cap: int = DEFAULT_CAP) -> EstimateResult:
    """Evaluate ``Q_S^v(f)`` over the nodes inside the support of ``f``."""
    if spec.transformed:
        return q_transformed(spec, f, cap)
    if not f.boundary_vanishing:
        raise ValueError(f"{f.name} does not vanish on the cube boundary; "
                         "use the transformed rule")
    if f.d != spec.d:
        raise ValueError("dimension mismatch between rule and function")
    S = spec.scaled()
    nodes = enumerate_nodes(S, spec.v, f.support, cap)
    vals = f(nodes.x) if len(nodes) else np.zeros(0)
    return EstimateResult(_weighted_sum(vals, nodes.weight), len(nodes), spec)


def q_transformed(spec: QuadratureSpec, f: TestFunction, cap: int = DEFAULT_CAP) -> EstimateResult:
    """``|det S|^-1 sum f(Psi(x)) |DPsi(x)|`` over nodes ``x`` in the closed unit cube."""
    if f.d != spec.d:
        raise ValueError("dimension mismatch between rule and function")
    spec = spec if spec.transformed else replace(spec, transformed=True)
    S = spec.scaled()
    nodes = enumerate_nodes(S, spec.v, SupportBox.unit(spec.d), cap)
    if len(nodes):
        jac = det_DPsi(nodes.x)
        vals = f(Psi(nodes.x)) * jac
    else:
        vals = np.zeros(0)
    return EstimateResult(_weighted_sum(vals, nodes.weight), len(nodes), spec)


def pullback(f: TestFunction) -> TestFunction:
    """``f(Psi(x)) |DPsi(x)|`` on the unit cube, zero outside."""
    unit = SupportBox.unit(f.d)

    def g(x):
        out = np.zeros(x.shape[0])
        inside = unit.contains(x)
        if np.any(inside):
            xi = x[inside]
            out[inside] = f(Psi(xi)) * det_DPsi(xi)
        return out

    return TestFunction(f"pullback({f.name})", f.d, g, unit, f.exact_integral,
                        frozenset({"infinitely-smooth"}) if "infinitely-smooth" in f.tags
                        else frozenset())


def frolov_deterministic(matrix: FrolovMatrix, n: float, f: TestFunction,
                         transformed: bool = False) -> EstimateResult:
    return q_value(QuadratureSpec(matrix, n, transformed=transformed), f)


# --- randomization -----------------------------------------------------------

def make_rng(master_seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based Philox stream for ``(master_seed, trial)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(master_seed), int(trial)])))


def sample_dilation(rng: np.random.Generator, d: int) -> np.ndarray:
    """Uniform on ``[1, 2^(1/d)]^d``."""
    return 1.0 + (2.0 ** (1.0 / d) - 1.0) * rng.random(d)


def sample_shift(rng: np.random.Generator, d: int) -> np.ndarray:
    """Uniform on ``[0, 1)^d``."""
    return rng.random(d)


def randomized_estimate(matrix: FrolovMatrix, n: float, f: TestFunction,
                        rng: np.random.Generator, mode: str = "dilation-shift",
                        v=None, transformed: bool = False) -> EstimateResult:
    """Sample ``u`` (and ``v`` in dilation-shift mode) and evaluate the rule.

    In dilation mode the shift is the fixed ``v`` (zero by default).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    d = matrix.d
    u = sample_dilation(rng, d)
    if mode == "dilation-shift":
        if v is not None:
            raise ValueError("v is sampled in dilation-shift mode")
        v = sample_shift(rng, d)
    spec = QuadratureSpec(matrix, n, u, v, transformed)
    return q_value(spec, f)
