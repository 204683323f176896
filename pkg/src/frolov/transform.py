"""Smooth change of variables onto the unit cube.

``psi`` is the normalised antiderivative of the bump
``h(x) = exp(1 / ((2x - 1)^2 - 1))`` on (0, 1). It is flat to all orders at
0 and 1, so ``f(Psi(x)) * |DPsi(x)|`` vanishes with all derivatives on the
cube boundary whenever ``f`` is smooth on the closed cube.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_PANELS = 32        # on [0, 1/2]; the upper half is obtained by reflection
_POINTS = 16


def h_bump(x):
    """``exp(-1 / (4 x (1 - x)))`` on (0, 1), exactly zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < 1.0)
    t = x[inside]
    q = 4.0 * t * (1.0 - t)
    # exp underflows to 0 well before q reaches 1/745; skip those points
    big = q > 1.0 / 740.0
    vals = np.zeros_like(t)
    vals[big] = np.exp(-1.0 / q[big])
    out[inside] = vals
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class PsiTable:
    """Panel table for ``psi`` on [0, 1/2].

    ``cumulative[k]`` is the integral of ``h`` over ``[0, edges[k]]``; a
    query inside panel ``k`` adds a 16-point Gauss-Legendre integral over
    ``[edges[k], x]``. Each term of that sum is increasing in ``x`` because
    ``h`` increases on [0, 1/2], so the computed ``psi`` is monotone.
    """

    edges: np.ndarray
    cumulative: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    c_h: float
    accuracy: float = 1e-12


@lru_cache(maxsize=1)
def psi_table() -> PsiTable:
    s, w = np.polynomial.legendre.leggauss(_POINTS)
    s = 0.5 * (s + 1.0)
    w = 0.5 * w
    edges = np.linspace(0.0, 0.5, _PANELS + 1)
    widths = np.diff(edges)
    panel = widths * (h_bump(edges[:-1, None] + widths[:, None] * s[None, :]) @ w)
    cumulative = np.concatenate([[0.0], np.cumsum(panel)])
    c_h = 2.0 * cumulative[-1]
    for arr in (edges, cumulative, s, w):
        arr.setflags(write=False)
    return PsiTable(edges, cumulative, s, w, float(c_h))


def _half_integral(x, tab: PsiTable):
    # integral of h over [0, x] for x in [0, 1/2]
    k = np.clip(np.searchsorted(tab.edges, x, side="right") - 1, 0, _PANELS - 1)
    left = tab.edges[k]
    dx = x - left
    pts = left[..., None] + dx[..., None] * tab.nodes
    return tab.cumulative[k] + dx * (h_bump(pts) @ tab.weights)


def psi(x):
    """Normalised antiderivative of ``h``; 0 below 0 and 1 above 1."""
    tab = psi_table()
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, 0.0, 1.0)
    lower = xc <= 0.5
    y = np.where(lower, xc, 1.0 - xc)
    val = _half_integral(y, tab) / tab.c_h
    out = np.where(lower, val, 1.0 - val)
    out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, out))
    out = np.where(xc == 0.5, 0.5, out)
    return out if out.ndim else float(out)


def psi_prime(x):
    out = h_bump(x) / psi_table().c_h
    return out


def Psi(x):
    """Componentwise ``psi`` on points of shape ``(..., d)``."""
    return psi(x)


def det_DPsi(x):
    """Jacobian determinant ``prod_j psi'(x_j)`` on points of shape ``(..., d)``."""
    x = np.asarray(x, dtype=float)
    return np.prod(psi_prime(x), axis=-1)


def c_h() -> float:
    """Integral of ``h`` over [0, 1]."""
    return psi_table().c_h
