"""Fourier-side diagnostics.

Weight functions of the mixed and isotropic Sobolev norms, the complement
``D_n`` of the hyperbolic cross, and the two dual-lattice series

    Q_S^v(f) - I(f) = sum_{m != 0} Ff(S m) exp(2 pi i <v, m>)
    E_V |Q_S^V(f) - I(f)|^2 = sum_{m != 0} |Ff(S m)|^2

with rigorous truncation bounds.

Tail bounds
-----------
Every attached transform satisfies ``|Ff(y)| <= prod_j min(c0, c1 |y_j|^-rho)``.
Frequency space is cut, per coordinate, into a central cell ``[-t*, t*]``
(``t*`` is where the envelope stops being flat) and geometric cells
``(t* q^(k-1), t* q^k]`` on either side. On a product cell the envelope is
at most the product of its values at the inner edges, and a box of volume
``V`` holds at most ``V / (n prod u) + 1`` points of the scaled Frolov
lattice. Summing ``(V / (n prod u) + 1) * envelope_max`` over all cells
factorises, so the bound for everything outside a chosen set of cells is a
closed form minus a finite sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .matrix import ScaledMatrix

TWO_PI = 2.0 * math.pi


# --- weights -----------------------------------------------------------------

def weight_hr(x, r: int):
    """Mixed-smoothness weight ``prod_j sum_{k=0}^r |2 pi x_j|^(2k)``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    t = (TWO_PI * np.asarray(x, dtype=float)) ** 2
    acc = np.ones_like(t)
    term = np.ones_like(t)
    for _ in range(r):
        term = term * t
        acc = acc + term
    return np.prod(acc, axis=-1)


def weight_vs(x, s: int):
    """Isotropic weight ``sum_{|alpha| <= s} prod_j |2 pi x_j|^(2 alpha_j)``."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    if not s > d / 2:
        raise ValueError(f"isotropic smoothness needs s > d/2, got s={s}, d={d}")
    t = (TWO_PI * x) ** 2
    # dp[k] = sum over multi-indices of total degree k in the coordinates seen so far
    dp = [np.ones(x.shape[:-1])] + [np.zeros(x.shape[:-1]) for _ in range(s)]
    for j in range(d):
        tj = t[..., j]
        new = []
        for k in range(s + 1):
            acc = np.zeros(x.shape[:-1])
            power = np.ones(x.shape[:-1])
            for i in range(k + 1):
                acc = acc + dp[k - i] * power
                power = power * tj
            new.append(acc)
        dp = new
    return sum(dp)


def in_Dn(x, n: float):
    """True where ``prod_j |x_j| >= n``."""
    if not n > 0:
        raise ValueError("n must be positive")
    return np.prod(np.abs(np.asarray(x, dtype=float)), axis=-1) >= n


# --- Fourier transforms with decay envelopes ----------------------------------

@dataclass(frozen=True)
class DecayModel:
    """Per-coordinate envelope ``min(c0, c1 |t|^-rho)``.

    Implies ``|Ff(y)| <= C prod_j (1 + |y_j|)^-rho`` with
    ``C = ((c0^(1/rho) + c1^(1/rho))^rho)^d``.
    """

    c0: float
    c1: float
    rho: float

    def envelope(self, t):
        a = np.abs(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            return np.minimum(self.c0, self.c1 * a ** -self.rho)

    def bound(self, y):
        return np.prod(self.envelope(y), axis=-1)

    @property
    def crossover(self) -> float:
        return (self.c1 / self.c0) ** (1.0 / self.rho)

    def C(self, d: int) -> float:
        return ((self.c0 ** (1 / self.rho) + self.c1 ** (1 / self.rho)) ** self.rho) ** d

    def squared(self) -> "DecayModel":
        return DecayModel(self.c0 ** 2, self.c1 ** 2, 2.0 * self.rho)


@dataclass(frozen=True, eq=False)
class FourierTransform:
    """``y -> Ff(y)`` on points of shape ``(..., d)``, complex valued."""

    evaluator: Callable
    decay: DecayModel
    d: int

    def __call__(self, y):
        return self.evaluator(np.asarray(y, dtype=float))


# --- truncated series --------------------------------------------------------

@dataclass(frozen=True)
class SeriesTruncation:
    """Either a sup-norm radius over ``m`` or a target for the tail bound."""

    radius: int | None = None
    tail_target: float | None = None
    max_terms: int = 20_000_000

    def __post_init__(self):
        if (self.radius is None) == (self.tail_target is None):
            raise ValueError("give exactly one of radius or tail_target")


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_bound: float
    terms: int
    max_index: int      # largest |m|_inf that contributed

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag_residual(self) -> float:
        return abs(self.value.imag)


class _Cells:
    """One-dimensional cell structure shared by all coordinates."""

    def __init__(self, model: DecayModel, q: float, K: int):
        self.model = model
        self.q = q
        self.K = K
        t0 = model.crossover
        self.t0 = t0
        self.edges = t0 * q ** np.arange(K + 1)           # e_0 .. e_K
        inner = np.concatenate([[0.0], self.edges[:-1]])
        lens = np.concatenate([[2 * t0], np.diff(self.edges)])
        g = model.envelope(inner)
        g[0] = model.c0
        self.len = lens            # index 0 central, k >= 1 one side
        self.g = g
        rho, c1 = model.rho, model.c1
        eK = self.edges[-1]
        # cells beyond e_K on one side, closed form
        self.outer_L = c1 * (q - 1) * eK ** (1 - rho) / (1 - q ** (1 - rho))
        self.outer_G = c1 * eK ** -rho / (1 - q ** -rho)

    def sums(self, upto: int | None = None):
        """(L, G) over signed cells with index |k| <= upto (all, incl. outer, if None)."""
        if upto is None:
            L = self.len[0] * self.g[0] + 2 * (np.sum(self.len[1:] * self.g[1:]) + self.outer_L)
            G = self.g[0] + 2 * (np.sum(self.g[1:]) + self.outer_G)
            return float(L), float(G)
        if upto < 0:
            return 0.0, 0.0
        L = self.len[0] * self.g[0] + 2 * np.sum(self.len[1:upto + 1] * self.g[1:upto + 1])
        G = self.g[0] + 2 * np.sum(self.g[1:upto + 1])
        return float(L), float(G)

    def signed(self):
        """Per signed index j in [-K, K]: (lo, hi, len, g)."""
        js = np.arange(-self.K, self.K + 1)
        k = np.abs(js)
        inner = np.where(k == 0, -self.t0, self.edges[np.maximum(k - 1, 0)])
        outer = self.edges[k]
        lo = np.where(js < 0, -outer, inner)
        hi = np.where(js < 0, -inner, outer)
        hi[self.K] = self.t0
        return js, lo, hi, self.len[k], self.g[k]

    def index_of(self, t):
        a = np.abs(t)
        k = np.searchsorted(self.edges, a, side="left")
        return np.where(t < 0, -k, k)


def _count_factor(S: ScaledMatrix) -> float:
    return 1.0 / (S.n * float(np.prod(S.u)))


def _cube_terms(S: ScaledMatrix, R: int, term_fn):
    d = S.d
    side = np.arange(-R, R + 1, dtype=np.int64)
    m = np.stack(np.meshgrid(*([side] * d), indexing="ij"), -1).reshape(-1, d)
    m = m[np.any(m != 0, axis=1)]
    return m, term_fn(m)


def _series(S: ScaledMatrix, model: DecayModel, term_fn, trunc: SeriesTruncation,
            complex_valued: bool):
    d = S.d
    kappa = _count_factor(S)
    q = math.sqrt(2.0) if d <= 2 else 2.0

    if trunc.radius is not None:
        R = int(trunc.radius)
        if R < 0:
            raise ValueError("radius must be >= 0")
        Sinv = np.linalg.inv(S.S)
        r0 = R / float(np.abs(Sinv).sum(axis=1).max())
        K = max(1, int(math.ceil(math.log(max(r0, model.crossover) / model.crossover, q))) + 1)
        cells = _Cells(model, q, K)
        L, G = cells.sums()
        if r0 < cells.t0:
            Lin, Gin = 0.0, 0.0
        else:
            upto = int(np.searchsorted(cells.edges, r0, side="right")) - 1
            Lin, Gin = cells.sums(upto)
        tail = kappa * (L ** d - Lin ** d) + (G ** d - Gin ** d)
        if (2 * R + 1) ** d > trunc.max_terms:
            raise ValueError("radius too large for the term budget")
        m, terms = _cube_terms(S, R, term_fn)
        return _finish(terms, tail, m, complex_valued)

    tau = float(trunc.tail_target)
    if not tau > 0:
        raise ValueError("tail target must be positive")
    K = 8
    while True:
        cells = _Cells(model, q, K)
        L, G = cells.sums()
        Lk, Gk = cells.sums(K)
        outer = kappa * (L ** d - Lk ** d) + (G ** d - Gk ** d)
        if outer <= 0.01 * tau or K >= 400:
            break
        K += 8
    js, lo1, hi1, len1, g1 = cells.signed()
    nj = js.size
    # product-cell bounds b = kappa * prod(len g) + prod(g)
    lg = len1 * g1
    bl = np.ones(()); bg = np.ones(())
    for _ in range(d):
        bl = np.multiply.outer(bl, lg)
        bg = np.multiply.outer(bg, g1)
    b = (kappa * bl + bg).ravel()
    order = np.argsort(-b, kind="stable")
    sb = b[order]
    # remaining bound after taking the first p cells: suffix sums, no cancellation
    suffix = np.concatenate([np.cumsum(sb[::-1])[::-1], [0.0]]) + outer
    p = int(np.argmax(suffix <= tau)) if np.any(suffix <= tau) else sb.size
    # cost guard: expected lattice points per cell
    vols = np.ones(())
    for _ in range(d):
        vols = np.multiply.outer(vols, len1)
    est = kappa * vols.ravel()[order] + 1.0
    cum_est = np.cumsum(est)
    if p > 0 and cum_est[p - 1] > trunc.max_terms:
        p = int(np.searchsorted(cum_est, trunc.max_terms, side="right"))
    tail = float(suffix[p])

    multi = np.array(np.unravel_index(order[:p], (nj,) * d)).T   # (p, d) positions
    Sinv = np.linalg.inv(S.S)
    zero = np.zeros(d)
    ms = []
    for cell in multi:
        lo = lo1[cell]
        hi = hi1[cell]
        slack = 1e-9 * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
        lo_s, hi_s = lo - slack, hi + slack
        mlo, mhi = _kernels.index_bounds(Sinv, lo_s, hi_s, zero)
        m = _kernels.box_points(S.S, zero, lo_s, hi_s, mlo, mhi)
        if m.size == 0:
            continue
        y = m.astype(float) @ S.S.T
        want = js[cell]
        keep = np.all(cells.index_of(y) == want, axis=1) & np.any(m != 0, axis=1)
        if np.any(keep):
            ms.append(m[keep])
    m = np.concatenate(ms) if ms else np.zeros((0, d), dtype=np.int64)
    terms = term_fn(m) if m.size else np.zeros(0, dtype=complex if complex_valued else float)
    return _finish(terms, tail, m, complex_valued)


def _finish(terms, tail, m, complex_valued):
    if complex_valued:
        val = complex(math.fsum(np.real(terms)), math.fsum(np.imag(terms)))
    else:
        val = math.fsum(terms)
    max_index = int(np.abs(m).max()) if m.size else 0
    return SeriesResult(val, float(tail), int(m.shape[0]), max_index)


def _check_model(ft: FourierTransform, power: int):
    if ft.decay.rho * power <= 1:
        raise ValueError("decay model is not summable (need rho > 1)")


def default_tail_target(ft: FourierTransform) -> float:
    return 1e-7 * abs(ft(np.zeros(ft.d))) + 1e-12


def fourier_error_series(S: ScaledMatrix, v, ft: FourierTransform,
                         trunc: SeriesTruncation | None = None) -> SeriesResult:
    """Partial sum of ``Ff(S m) exp(2 pi i <v, m>)`` over nonzero ``m``."""
    _check_model(ft, 1)
    v = np.zeros(S.d) if v is None else np.asarray(v, dtype=float)
    trunc = trunc or SeriesTruncation(tail_target=default_tail_target(ft))

    def term(m):
        y = m.astype(float) @ S.S.T
        return ft(y) * np.exp(2j * math.pi * (m.astype(float) @ v))

    return _series(S, ft.decay, term, trunc, complex_valued=True)


def variance_series(S: ScaledMatrix, ft: FourierTransform,
                    trunc: SeriesTruncation | None = None) -> SeriesResult:
    """Partial sum of ``|Ff(S m)|^2`` over nonzero ``m``."""
    _check_model(ft, 2)
    if trunc is None:
        f0 = abs(ft(np.zeros(ft.d)))
        trunc = SeriesTruncation(tail_target=1e-10 * f0 * f0 + 1e-30)

    def term(m):
        y = m.astype(float) @ S.S.T
        return np.abs(ft(y)) ** 2

    return _series(S, ft.decay.squared(), term, trunc, complex_valued=False)
