"""Integer generator polynomials and their real roots.

The Frolov generator matrix is a Vandermonde matrix built from the d real
roots of a monic, irreducible integer polynomial. Two families are provided:

* ``frolov_poly(d)``: ``(x-1)(x-3)...(x-2d+1) - 1``, any ``d``;
* ``chebyshev_roots(d)``: roots of ``2 T_d(x/2)`` for ``d`` a power of two,
  available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_FROLOV_DIM = 10


@dataclass(frozen=True)
class IntPolynomial:
    """Monic integer polynomial, coefficients in ascending degree order."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        if self.coeffs[-1] != 1:
            raise ValueError("polynomial must be monic")
        if not all(isinstance(c, int) for c in self.coeffs):
            raise TypeError("coefficients must be exact integers")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction arguments."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative_at(self, x):
        acc = 0
        for k in range(self.degree, 0, -1):
            acc = acc * x + k * self.coeffs[k]
        return acc


@dataclass(frozen=True)
class RootSet:
    roots: tuple[float, ...]
    residual: float
    source: str = ""

    def __len__(self):
        return len(self.roots)

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=float)


def frolov_poly(d: int) -> IntPolynomial:
    """Expand ``prod_{k=1}^d (x - (2k-1)) - 1`` in exact integers.

    Dimensions above ``MAX_FROLOV_DIM`` are rejected: beyond it the
    coefficients leave the signed 64-bit range that downstream float
    conversion is validated for.
    """
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if d > MAX_FROLOV_DIM:
        raise ValueError(f"frolov_poly supports d <= {MAX_FROLOV_DIM}, got {d}")
    coeffs = [1]
    for k in range(1, int(d) + 1):
        a = 2 * k - 1
        # multiply by (x - a)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] -= a * c
            nxt[i + 1] += c
        coeffs = nxt
    coeffs[0] -= 1
    return IntPolynomial(tuple(coeffs))


def _is_power_of_two(d: int) -> bool:
    return d >= 1 and (d & (d - 1)) == 0


def chebyshev_roots(d: int) -> RootSet:
    """Roots ``2 cos((2j-1) pi / (2d))`` of ``2 T_d(x/2)``, sorted increasing."""
    if not isinstance(d, (int, np.integer)) or not _is_power_of_two(int(d)):
        raise ValueError(f"chebyshev construction needs d a power of two, got {d!r}")
    d = int(d)
    roots = sorted(2.0 * math.cos((2 * j - 1) * math.pi / (2 * d)) for j in range(1, d + 1))
    if d == 1:
        roots = [0.0]
    # symmetric pairs: make them exact negatives of each other
    for i in range(d // 2):
        r = 0.5 * (roots[d - 1 - i] - roots[i])
        roots[i], roots[d - 1 - i] = -r, r
    return RootSet(tuple(roots), residual=_cheb_residual(roots, d), source="chebyshev")


def _cheb_residual(roots, d):
    # 2 T_d(x/2) via the recurrence, evaluated in float
    worst = 0.0
    for z in roots:
        t0, t1 = 2.0, z
        if d == 1:
            val = t1
        else:
            for _ in range(d - 1):
                t0, t1 = t1, z * t1 - t0
            val = t1
        worst = max(worst, abs(val))
    return worst


def _residual_exact(p: IntPolynomial, z: float) -> float:
    return abs(float(p(Fraction(z))))


def real_roots(p: IntPolynomial, *, lo: float | None = None, hi: float | None = None,
               step: float = 0.25) -> RootSet:
    """Isolate and refine all ``d`` real roots of ``p``.

    Sign changes are bracketed on a uniform grid (default ``[0, 2d]`` with
    step 1/4, which holds the roots of ``frolov_poly(d)``), each bracket is
    bisected down to width 1e-8 and then polished with Newton's method.
    Residuals are evaluated exactly at the returned floats.
    """
    d = p.degree
    lo = 0.0 if lo is None else lo
    hi = 2.0 * d if hi is None else hi
    grid = [lo + k * step for k in range(int(round((hi - lo) / step)) + 1)]
    vals = [p(Fraction(g)) for g in grid]

    brackets = []
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa == 0:
            brackets.append((a, a))
        elif fa * fb < 0:
            brackets.append((a, b))
    if vals[-1] == 0:
        brackets.append((grid[-1], grid[-1]))
    if len(brackets) != d:
        raise ValueError(
            f"found {len(brackets)} sign changes on [{lo}, {hi}] for a degree-{d} "
            "polynomial; not a polynomial with d well-separated real roots")

    roots = []
    for a, b in brackets:
        if a == b:
            roots.append(float(a))
            continue
        fa = float(p(Fraction(a)))
        while b - a > 1e-8:
            mid = 0.5 * (a + b)
            fm = float(p(Fraction(mid)))
            if fm == 0:
                a = b = mid
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        z = 0.5 * (a + b)
        for _ in range(50):
            fz = p(Fraction(z))
            if fz == 0:
                break
            step_z = float(fz / p.derivative_at(Fraction(z)))
            z_new = z - step_z
            if z_new == z or abs(step_z) <= 4e-16 * max(1.0, abs(z)):
                z = z_new
                break
            z = z_new
        # pick the best of the nearest floats (Newton may stop one ulp off)
        cands = [z, math.nextafter(z, -math.inf), math.nextafter(z, math.inf)]
        z = min(cands, key=lambda c: _residual_exact(p, c))
        roots.append(z)

    roots.sort()
    residual = max(_residual_exact(p, z) for z in roots)
    bound = 1e-12 * (1.0 + max(abs(z) for z in roots)) ** d
    if residual > bound:
        raise ArithmeticError(f"root refinement residual {residual:g} exceeds {bound:g}")
    return RootSet(tuple(roots), residual=residual, source="frolov-poly")
