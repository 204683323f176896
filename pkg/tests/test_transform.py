import math

import mpmath as mp
import numpy as np
import pytest

from frolov.transform import Psi, c_h, det_DPsi, h_bump, psi, psi_prime, psi_table

mp.mp.dps = 30


def h_mp(t):
    return mp.e ** (1 / ((2 * t - 1) ** 2 - 1)) if 0 < t < 1 else mp.mpf(0)


C_H_REF = mp.quad(h_mp, [0, 0.5, 1])


def test_h_examples():
    assert h_bump(0.5) == pytest.approx(math.exp(-1), rel=1e-15)
    assert h_bump(0.0) == 0.0 and h_bump(1.0) == 0.0
    assert h_bump(-3.0) == 0.0 and h_bump(7.0) == 0.0
    assert h_bump(0.3) == h_bump(0.7)
    x = np.array([1e-300, 1e-12, 1e-3, 1 - 1e-16])
    with np.errstate(all="raise"):
        out = h_bump(x)
    assert np.all(np.isfinite(out)) and np.all(out >= 0)


def test_h_matches_definition(rng):
    x = rng.uniform(0.01, 0.99, 200)
    np.testing.assert_allclose(h_bump(x), np.exp(1 / ((2 * x - 1) ** 2 - 1)), rtol=1e-13)


def test_c_h_against_mpmath():
    assert c_h() == pytest.approx(float(C_H_REF), rel=1e-14)
    assert psi_table().accuracy == 1e-12


def test_psi_examples():
    assert psi(0.0) == 0.0 and psi(1.0) == 1.0 and psi(0.5) == 0.5
    assert psi(-2.0) == 0.0 and psi(3.0) == 1.0
    assert psi(0.25) + psi(0.75) == pytest.approx(1.0, abs=1e-15)


def test_psi_against_mpmath(rng):
    for x in np.concatenate([rng.uniform(0, 1, 40), [1e-3, 0.1, 0.49, 0.51, 0.999]]):
        ref = mp.quad(h_mp, [0, min(x, 0.5), x] if x > 0.5 else [0, x]) / C_H_REF
        assert abs(psi(x) - float(ref)) <= 1e-12


def test_psi_monotone(rng):
    a = rng.uniform(0, 1, 10_000)
    b = rng.uniform(0, 1, 10_000)
    x, y = np.minimum(a, b), np.maximum(a, b)
    px, py = psi(x), psi(y)
    assert np.all(px <= py)
    # strict wherever the values are representable apart: psi rounds to 1 near x = 1
    sep = (x < y) & (py < 1.0)
    assert np.all(px[sep] < py[sep])
    lower = (x < y) & (y <= 0.5)
    assert np.all(px[lower] < py[lower])


def test_psi_prime_examples():
    assert psi_prime(0.0) == 0.0 and psi_prime(1.0) == 0.0
    assert psi_prime(0.5) == pytest.approx(math.exp(-1) / float(C_H_REF), rel=1e-14)
    s, w = np.polynomial.legendre.leggauss(64)
    total = sum(0.25 * np.dot(w, psi_prime(0.25 * (s + 1) + 0.5 * k)) for k in range(2))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_central_difference_second_order():
    x = 0.3
    errs = [abs((psi(x + e) - psi(x - e)) / (2 * e) - psi_prime(x)) for e in (1e-3, 1e-4)]
    assert errs[1] < errs[0] / 50                      # second order: factor ~100
    e = 1e-5
    assert abs((psi(x + e) - psi(x - e)) / (2 * e) - psi_prime(x)) < 1e-9


def test_Psi_and_jacobian():
    d = 3
    np.testing.assert_array_equal(Psi(np.zeros(d)), np.zeros(d))
    np.testing.assert_array_equal(Psi(np.ones(d)), np.ones(d))
    assert det_DPsi(np.full(d, 0.5)) == pytest.approx((math.exp(-1) / c_h()) ** d, rel=1e-13)
    face = np.array([[0.0, 0.3, 0.7], [0.2, 1.0, 0.4]])
    np.testing.assert_array_equal(det_DPsi(face), [0.0, 0.0])


def test_change_of_variables_identity():
    s, w = np.polynomial.legendre.leggauss(64)
    # composite rule on [0, 1] with 8 panels, tensorised in 2-D
    edges = np.linspace(0, 1, 9)
    pts = np.concatenate([(a + (b - a) * (s + 1) / 2) for a, b in zip(edges, edges[1:])])
    wts = np.concatenate([(b - a) / 2 * w for a, b in zip(edges, edges[1:])])
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    W = np.outer(wts, wts)
    P = np.stack([X.ravel(), Y.ravel()], 1)
    f = lambda z: (1 + z[:, 0]) * (1 + z[:, 1])
    val = np.sum(W.ravel() * f(Psi(P)) * det_DPsi(P))
    assert val == pytest.approx(2.25, abs=1e-9)
