import math

import numpy as np
import pytest
import sympy as sp

from frolov import corpus
from frolov.transform import c_h
from oracles import ft_1d, tensor_integral

ONE_D = {
    "tent": lambda t: 1 - abs(2 * t - 1),
    "poly-bump:r=1": lambda t: t * (1 - t),
    "poly-bump:r=2": lambda t: (t * (1 - t)) ** 2,
    "poly-bump:r=3": lambda t: (t * (1 - t)) ** 3,
    "boundary-poly": lambda t: 1 + t,
}


def test_examples():
    assert corpus.tent(2).exact_integral == 0.25
    assert corpus.tent(3)(np.full((1, 3), 0.5))[0] == 1.0
    assert corpus.poly_bump(1, 1).exact_integral == pytest.approx(1 / 6, rel=1e-15)
    assert corpus.poly_bump(2, 2).exact_integral == pytest.approx(1 / 900, rel=1e-15)
    assert corpus.smooth_bump(1).exact_integral == c_h()
    assert corpus.smooth_bump(2)(np.full((1, 2), 0.5))[0] == pytest.approx(math.exp(-2))
    assert corpus.boundary_poly(2).exact_integral == 2.25
    assert corpus.boundary_poly(1).exact_integral == 1.5
    assert corpus.boundary_poly(2)(np.zeros((1, 2)))[0] == 1.0
    assert not corpus.boundary_poly(2).boundary_vanishing
    for d in (1, 2, 3):
        f = corpus.tent(d)
        assert f.fourier(np.zeros(d)) == pytest.approx(2.0 ** -d)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_poly_bump_integral_symbolic(r):
    x = sp.Symbol("x")
    ref = sp.integrate((x * (1 - x)) ** r, (x, 0, 1))
    assert corpus.poly_bump(1, r).exact_integral == pytest.approx(float(ref), rel=1e-15)


def test_poly_bump_boundary_derivatives():
    x = sp.Symbol("x")
    for r in (1, 2, 3):
        p = (x * (1 - x)) ** r
        for k in range(r):
            assert sp.diff(p, x, k).subs(x, 0) == 0 and sp.diff(p, x, k).subs(x, 1) == 0


@pytest.mark.parametrize("name", ["tent", "poly-bump:r=1", "poly-bump:r=2", "poly-bump:r=3",
                                  "smooth-bump", "boundary-poly"])
@pytest.mark.parametrize("d", [1, 2])
def test_exact_integral_against_gauss_legendre(name, d):
    f = corpus.get(name, d)
    assert tensor_integral(f, d) == pytest.approx(f.exact_integral, abs=1e-10)


@pytest.mark.parametrize("name", ["tent", "poly-bump:r=2", "smooth-bump", "boundary-poly"])
def test_exact_integral_three_dims(name):
    f = corpus.get(name, 3)
    assert tensor_integral(f, 3) == pytest.approx(f.exact_integral, abs=1e-8)


@pytest.mark.parametrize("name", ["tent", "poly-bump:r=1", "poly-bump:r=2", "poly-bump:r=3"])
def test_fourier_against_numerical_oracle(name, rng):
    f1 = ONE_D[name]
    for d in (1, 2):
        f = corpus.get(name, d)
        ys = rng.uniform(-20, 20, (20, d))
        ys[0] = rng.uniform(-0.3, 0.3, d)      # exercise the small-frequency branch
        for y in ys:
            ref = np.prod([ft_1d(f1, t) for t in y])
            assert abs(f.fourier(y) - ref) <= 1e-8


@pytest.mark.parametrize("name", ["tent", "poly-bump:r=1", "poly-bump:r=2", "poly-bump:r=3"])
def test_decay_model_dominates(name, rng):
    for d in (1, 2, 3):
        ft = corpus.get(name, d).fourier
        y = rng.standard_cauchy((1000, d)) * 5
        y[:10] = 0.0
        val = np.abs(ft(y))
        assert np.all(val <= ft.decay.bound(y) * (1 + 1e-12))
        C, rho = ft.decay.C(d), ft.decay.rho
        assert np.all(val <= C * np.prod((1 + np.abs(y)) ** -rho, axis=1) * (1 + 1e-12))


def test_poly_bump_transform_branches_agree():
    ft = corpus.poly_bump(1, 2).fourier
    edge = 4.0 / (2 * math.pi)       # where the series and closed-form branches meet
    for y in (edge - 1e-9, edge + 1e-9, 1e-6, 0.0):
        ref = ft_1d(ONE_D["poly-bump:r=2"], y)
        assert abs(ft(np.array([y])) - ref) <= 1e-13


@pytest.mark.parametrize("name", list(ONE_D) + ["smooth-bump"])
def test_tensor_structure(name, rng):
    d = 3
    f = corpus.get(name, d)
    from frolov.transform import h_bump
    f1 = ONE_D.get(name, h_bump)
    x = rng.uniform(0, 1, (50, d))
    want = np.prod([[f1(t) for t in row] for row in x], axis=1)
    np.testing.assert_allclose(f(x), want, rtol=1e-13, atol=1e-300)


def test_zero_outside_support(rng):
    x = rng.uniform(-1, 2, (500, 2))
    outside = np.any((x < 0) | (x > 1), axis=1)
    for name in ("tent", "poly-bump:r=2", "smooth-bump", "boundary-poly"):
        assert np.all(corpus.get(name, 2)(x)[outside] == 0.0)


def test_lookup_errors():
    with pytest.raises(ValueError):
        corpus.get("nope", 2)
    with pytest.raises(ValueError):
        corpus.get("poly-bump:q=2", 2)
    with pytest.raises(ValueError):
        corpus.get("poly-bump:r=x", 2)
    with pytest.raises(ValueError):
        corpus.tent(0)
    with pytest.raises(ValueError):
        corpus.tent(2)(np.zeros((3, 3)))
    assert corpus.get("poly-bump:r=3", 2).name == "poly-bump:r=3"
