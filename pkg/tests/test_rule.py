import math

import numpy as np
import pytest

from frolov import corpus
from frolov.corpus import TestFunction
from frolov.lattice import SupportBox
from frolov.matrix import frolov_matrix
from frolov.rule import (QuadratureSpec, frolov_deterministic, make_rng, pullback, q_transformed,
                         q_value, randomized_estimate, sample_dilation, sample_shift)

B1 = frolov_matrix(1)      # B = [1]
B2 = frolov_matrix(2)


def const_one(d):
    return TestFunction("one", d, lambda x: np.ones(x.shape[0]), SupportBox.unit(d), 1.0,
                        frozenset({"boundary-nonvanishing"}))


def test_zero_function():
    assert q_value(QuadratureSpec(B2, 64.0), corpus.zero(2)).value == 0.0


def test_five_node_hand_computation():
    r = q_value(QuadratureSpec(B1, 4.0), corpus.poly_bump(1, 1))
    assert r.value == 0.15625
    assert r.node_count == 5


def test_deterministic_examples():
    f = corpus.tent(1)
    assert frolov_deterministic(B1, 1.0, f).value == f(np.zeros((1, 1)))[0]
    assert frolov_deterministic(B1, 4096.0, corpus.poly_bump(1, 1)).value == pytest.approx(
        1 / 6, abs=1e-7)
    t2 = corpus.tent(2)
    errs = [abs(frolov_deterministic(B2, 2.0 ** k, t2).value - 0.25) for k in (4, 8, 12)]
    assert errs[0] > errs[1] > errs[2]


def test_rejects_boundary_nonvanishing_untransformed():
    with pytest.raises(ValueError):
        q_value(QuadratureSpec(B2, 16.0), corpus.boundary_poly(2))
    with pytest.raises(ValueError):
        q_value(QuadratureSpec(B2, 16.0), corpus.tent(3))
    with pytest.raises(ValueError):
        QuadratureSpec(B2, 0.5)
    with pytest.raises(ValueError):
        QuadratureSpec(B2, 4.0, u=[1.0])


def test_samplers():
    for d in (1, 2, 3):
        g = make_rng(7, 0)
        u = np.array([sample_dilation(g, d) for _ in range(100_000)])
        assert u.min() >= 1.0 and u.max() <= 2 ** (1 / d)
        mean, sd = (1 + 2 ** (1 / d)) / 2, (2 ** (1 / d) - 1) / math.sqrt(12)
        assert np.all(np.abs(u.mean(axis=0) - mean) <= 4 * sd / math.sqrt(u.shape[0]))
        v = np.array([sample_shift(g, d) for _ in range(100_000)])
        assert v.min() >= 0.0 and v.max() < 1.0
        assert np.all(np.abs(v.mean(axis=0) - 0.5) <= 4 * math.sqrt(1 / 12) / math.sqrt(1e5))
    a = [sample_dilation(make_rng(3, 5), 2) for _ in range(2)]
    np.testing.assert_array_equal(a[0], a[1])
    np.testing.assert_array_equal(sample_shift(make_rng(3, 5), 2), sample_shift(make_rng(3, 5), 2))
    assert not np.array_equal(sample_shift(make_rng(3, 5), 2), sample_shift(make_rng(3, 6), 2))


def test_randomized_composition():
    f = corpus.tent(2)
    r = randomized_estimate(B2, 256.0, f, make_rng(11), "dilation")
    u = sample_dilation(make_rng(11), 2)
    np.testing.assert_array_equal(r.spec.u, u)
    assert r.value == q_value(QuadratureSpec(B2, 256.0, u), f).value
    np.testing.assert_array_equal(r.spec.v, np.zeros(2))
    with pytest.raises(ValueError):
        randomized_estimate(B2, 256.0, f, make_rng(11), "bogus")
    with pytest.raises(ValueError):
        randomized_estimate(B2, 256.0, f, make_rng(11), "dilation-shift", v=[0.1, 0.2])


@pytest.mark.parametrize("d", [1, 2, 3])
def test_node_count_bound(d):
    fm = frolov_matrix(d)
    f = corpus.tent(d)
    for t in range(30):
        n = 2.0 ** (4 + t % 6)
        r = randomized_estimate(fm, n, f, make_rng(1, t))
        assert r.node_count <= 2 * (fm.col_norm1 + 1) ** d * n


def test_linearity_and_weight_scaling(rng):
    spec = QuadratureSpec(B2, 300.0, [1.1, 1.3], [0.4, 0.8])
    f, g = corpus.tent(2), corpus.poly_bump(2, 2)
    a, b = 2.5, -0.7
    combo = TestFunction("combo", 2, lambda x: a * f(x) + b * g(x), SupportBox.unit(2), 0.0)
    lhs = q_value(spec, combo).value
    rhs = a * q_value(spec, f).value + b * q_value(spec, g).value
    assert lhs == pytest.approx(rhs, rel=1e-12)
    s1 = QuadratureSpec(B2, 300.0, [1.1, 1.3]).scaled()
    s2 = QuadratureSpec(B2, 600.0, [1.1, 1.3]).scaled()
    assert 1 / s2.det_abs == 0.5 * (1 / s1.det_abs)


def test_transformed_examples():
    for n in (2.0 ** 8, 2.0 ** 12):
        r = q_transformed(QuadratureSpec(B2, n, v=[0.3, 0.6]), const_one(2))
        assert r.spec.transformed
    assert q_transformed(QuadratureSpec(B2, 4096.0, v=[0.3, 0.6]), const_one(2)).value == \
        pytest.approx(1.0, abs=1e-8)
    assert q_transformed(QuadratureSpec(B2, 4096.0, v=[0.3, 0.6]),
                         corpus.boundary_poly(2)).value == pytest.approx(2.25, abs=1e-8)
    # v = 0 places a node at the origin; its weight |DPsi| is zero
    spec = QuadratureSpec(B2, 64.0, transformed=True)
    f = corpus.boundary_poly(2)
    assert q_value(spec, f).value == q_transformed(spec, f).value


def test_transformed_matches_pullback():
    for f in (corpus.boundary_poly(2), corpus.tent(2), corpus.smooth_bump(2)):
        for n, u, v in [(64.0, None, None), (500.0, [1.2, 1.01], [0.25, 0.5])]:
            a = q_transformed(QuadratureSpec(B2, n, u, v), f).value
            b = q_value(QuadratureSpec(B2, n, u, v), pullback(f)).value
            assert a == pytest.approx(b, rel=1e-12)
