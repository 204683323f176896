"""Test integrands with exact integrals and, where available, Fourier transforms.

All functions are tensor products of a one-dimensional factor. The
Fourier convention is ``Ff(y) = int f(x) exp(-2 pi i <x, y>) dx``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .lattice import SupportBox
from .spectral import DecayModel, FourierTransform
from .transform import c_h, h_bump

NAMES = ("tent", "poly-bump", "smooth-bump", "boundary-poly", "zero")


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Vectorised integrand on points of shape ``(N, d)``, zero outside ``support``."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    d: int
    evaluator: Callable
    support: SupportBox
    exact_integral: float
    tags: frozenset = field(default_factory=frozenset)
    fourier: FourierTransform | None = None

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.d:
            raise ValueError(f"{self.name} expects points of dimension {self.d}")
        return self.evaluator(x)

    @property
    def boundary_vanishing(self) -> bool:
        return "boundary-nonvanishing" not in self.tags


def _tensor(factor: Callable, inside_open: bool = False) -> Callable:
    def f(x):
        inside = np.all((x > 0) & (x < 1) if inside_open else (x >= 0) & (x <= 1), axis=1)
        out = np.zeros(x.shape[0])
        if np.any(inside):
            out[inside] = np.prod(factor(x[inside]), axis=1)
        return out
    return f


def _tensor_ft(factor_ft: Callable) -> Callable:
    def F(y):
        return np.prod(factor_ft(y), axis=-1)
    return F


# --- tent ---------------------------------------------------------------------

def tent(d: int) -> TestFunction:
    """``prod_j (1 - |2 x_j - 1|)`` on the unit cube."""
    _check_d(d)

    def ft1(y):
        return 0.5 * np.sinc(y / 2) ** 2 * np.exp(-1j * np.pi * y)

    ft = FourierTransform(_tensor_ft(ft1), DecayModel(0.5, 2.0 / math.pi ** 2, 2.0), d)
    return TestFunction("tent", d, _tensor(lambda t: 1.0 - np.abs(2.0 * t - 1.0)),
                        SupportBox.unit(d), 0.5 ** d, frozenset({"mixed:1"}), ft)


# --- polynomial bump ----------------------------------------------------------

def _poly_coeffs(r: int) -> list[int]:
    # (x (1 - x))^r in ascending powers
    return [0] * r + [math.comb(r, k) * (-1) ** k for k in range(r + 1)]


def _derivs_at(coeffs: list[int], x: int) -> list[int]:
    """All derivatives ``p^(k)(x)`` for integer ``x``."""
    out = []
    c = list(coeffs)
    while c:
        out.append(sum(a * x ** i for i, a in enumerate(c)))
        c = [i * a for i, a in enumerate(c)][1:]
    return out


def _poly_bump_ft1(r: int):
    coeffs = _poly_coeffs(r)
    deg = len(coeffs) - 1
    at0 = _derivs_at(coeffs, 0)
    at1 = _derivs_at(coeffs, 1)
    # moments mu_j = int_0^1 x^j p(x) dx for the small-frequency series
    nterms = 60
    mu = [float(sum(Fraction(a, i + j + 1) for i, a in enumerate(coeffs))) for j in range(nterms)]
    fact = [float(math.factorial(j)) for j in range(nterms)]

    def ft1(y):
        y = np.asarray(y, dtype=float)
        w = 2.0 * np.pi * y
        out = np.zeros(y.shape, dtype=complex)
        small = np.abs(w) < 4.0
        ws = w[small]
        acc = np.zeros(ws.shape, dtype=complex)
        z = np.ones(ws.shape, dtype=complex)
        for j in range(nterms):
            acc += z * (mu[j] / fact[j])
            z = z * (-1j * ws)
        out[small] = acc
        wl = w[~small]
        e = np.exp(-1j * wl)
        acc = np.zeros(wl.shape, dtype=complex)
        for k in range(deg + 1):
            acc += (-1) ** k * (at1[k] * e - at0[k]) / (-1j * wl) ** (k + 1)
        out[~small] = acc
        return out

    integral = (math.factorial(r) ** 2) / math.factorial(2 * r + 1)
    c1 = sum((abs(at0[k]) + abs(at1[k])) / (2 * math.pi) ** (k + 1) for k in range(r, deg + 1))
    model = DecayModel(integral, max(c1, integral), float(r + 1))
    return ft1, model, integral


def poly_bump(d: int, r: int = 2) -> TestFunction:
    """``prod_j (x_j (1 - x_j))^r``; its zero extension lies in the mixed space of order ``r``."""
    _check_d(d)
    if r < 1:
        raise ValueError("r must be >= 1")
    ft1, model, integral = _poly_bump_ft1(r)
    ft = FourierTransform(_tensor_ft(ft1), model, d)
    return TestFunction(f"poly-bump:r={r}", d, _tensor(lambda t: (t * (1.0 - t)) ** r),
                        SupportBox.unit(d), integral ** d, frozenset({f"mixed:{r}"}), ft)


# --- smooth bump and boundary polynomial --------------------------------------

def smooth_bump(d: int) -> TestFunction:
    """``prod_j h(x_j)`` with the infinitely flat bump used by the transform."""
    _check_d(d)
    return TestFunction("smooth-bump", d, _tensor(h_bump, inside_open=True),
                        SupportBox.unit(d), c_h() ** d, frozenset({"infinitely-smooth"}))


def boundary_poly(d: int) -> TestFunction:
    """``prod_j (1 + x_j)``; smooth on the closed cube but nonzero on its boundary."""
    _check_d(d)
    return TestFunction("boundary-poly", d, _tensor(lambda t: 1.0 + t), SupportBox.unit(d),
                        1.5 ** d, frozenset({"boundary-nonvanishing", "infinitely-smooth"}))


def zero(d: int) -> TestFunction:
    _check_d(d)
    ft = FourierTransform(lambda y: np.zeros(np.shape(y)[:-1], dtype=complex),
                          DecayModel(1e-100, 1e-100, 2.0), d)
    return TestFunction("zero", d, lambda x: np.zeros(x.shape[0]), SupportBox.unit(d), 0.0,
                        frozenset({"infinitely-smooth"}), ft)


def _check_d(d: int):
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")


def get(spec: str, d: int) -> TestFunction:
    """Look up a function by name, e.g. ``"tent"`` or ``"poly-bump:r=3"``."""
    base, _, params = spec.partition(":")
    kw = {}
    for item in filter(None, params.split(",")):
        m = re.fullmatch(r"\s*(\w+)\s*=\s*(\d+)\s*", item)
        if not m:
            raise ValueError(f"cannot parse parameter {item!r} in {spec!r}")
        kw[m.group(1)] = int(m.group(2))
    table = {"tent": tent, "poly-bump": poly_bump, "smooth-bump": smooth_bump,
             "boundary-poly": boundary_poly, "zero": zero}
    if base not in table:
        raise ValueError(f"unknown test function {base!r}; choose from {NAMES}")
    try:
        return table[base](d, **kw)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {base!r}: {kw}") from exc
