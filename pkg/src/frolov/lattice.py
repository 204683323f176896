"""Enumeration of the nodes ``S^{-T}(m + v)`` inside an axis-parallel box."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .matrix import ScaledMatrix

DEFAULT_CAP = 10**9


class EnumerationCapError(ValueError):
    """Raised when the candidate index box is larger than allowed."""


@dataclass(frozen=True)
class SupportBox:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.asarray(self.hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise ValueError("lo and hi must have the same length")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls, d: int) -> "SupportBox":
        return cls(np.zeros(d), np.ones(d))

    @classmethod
    def cube(cls, center, l: float) -> "SupportBox":
        c = np.asarray(center, dtype=float)
        return cls(c - l / 2, c + l / 2)

    @property
    def d(self) -> int:
        return self.lo.size

    @property
    def empty(self) -> bool:
        return bool(np.any(self.lo > self.hi))

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.all((x >= self.lo) & (x <= self.hi), axis=1)


@dataclass(frozen=True)
class NodeSet:
    m: np.ndarray       # (N, d) int64, lexicographic
    x: np.ndarray       # (N, d) float
    weight: float       # 1 / |det S|

    def __len__(self):
        return self.m.shape[0]


def _as_scaled(S):
    if isinstance(S, ScaledMatrix):
        return S.S, S.S_invT, S.det_abs
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("S must be a square matrix")
    return S, np.linalg.inv(S).T, abs(float(np.linalg.det(S)))


def candidate_bounds(S, v, box: SupportBox):
    """Integer bounding box of ``S^T box - v``, outward rounded by one."""
    S, S_invT, _ = _as_scaled(S)
    v = np.asarray(v, dtype=float)
    return _kernels.index_bounds(S.T, box.lo, box.hi, S_invT @ v)


def enumerate_nodes(S, v, box: SupportBox, cap: int = DEFAULT_CAP) -> NodeSet:
    """All nodes ``x = S^{-T}(m + v)`` with ``box.lo <= x <= box.hi`` (closed box).

    Indices come back in lexicographic order of ``m``.
    """
    S_, S_invT, det = _as_scaled(S)
    d = S_.shape[0]
    v = np.zeros(d) if v is None else np.asarray(v, dtype=float).reshape(-1)
    if box.d != d or v.size != d:
        raise ValueError("dimension mismatch between matrix, shift and box")
    if box.empty:
        raise ValueError("support box is empty")
    offset = S_invT @ v
    mlo, mhi = _kernels.index_bounds(S_.T, box.lo, box.hi, offset)
    total = float(np.prod((mhi - mlo + 1).astype(float)))
    if total > cap:
        raise EnumerationCapError(f"{total:.3g} candidate indices exceed the cap {cap:.3g}")
    m = _kernels.box_points(S_invT, offset, box.lo, box.hi, mlo, mhi)
    x = (m.astype(float) + v) @ S_invT.T
    keep = np.all((x >= box.lo) & (x <= box.hi), axis=1)
    return NodeSet(m[keep], x[keep], 1.0 / det)


def node_bound(l: float, norm1: float, a: float, d: int) -> int:
    """Upper bound ``(l*norm1 + 1)^d * a^d`` on the node count for a cube of edge ``l``.

    The count is an integer, so the floor of the real bound is still a bound;
    a relative guard of 1e-12 keeps rounding from pushing exact integers down.
    """
    if l <= 0 or a < 1:
        raise ValueError("need l > 0 and a >= 1")
    return math.floor((l * norm1 + 1.0) ** d * a ** d * (1.0 + 1e-12))
