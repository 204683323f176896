import math
import warnings

import numpy as np
import pytest

from frolov import harness as H
from frolov.matrix import frolov_matrix, scale


def test_fit_slope_examples():
    n = 2.0 ** np.arange(4, 15)
    fit = H.fit_slope(n, n ** -1.5)
    assert fit.slope == pytest.approx(-1.5, abs=1e-12)
    assert H.fit_slope(n, np.full(n.size, 0.3)).slope == pytest.approx(0.0, abs=1e-12)


def test_fit_slope_log_contaminated():
    # frozen from an independent lstsq on the exact synthetic data
    n = 2.0 ** np.arange(4, 15)
    err = n ** -1.0 * np.log(n) ** 0.5
    fit = H.fit_slope(n, err)
    x = np.log(n)
    ref = np.polyfit(x, np.log(err), 1)[0]
    assert fit.slope == pytest.approx(ref, abs=1e-12)
    assert fit.slope == pytest.approx(-0.9128323, abs=1e-6)
    assert fit.loglog_slope == pytest.approx(-1.0, abs=0.02)
    assert fit.loglog_coef == pytest.approx(0.5, abs=1e-9)


def test_fit_slope_errors():
    n = [16.0, 32.0, 64.0, 128.0, 256.0]
    with pytest.warns(UserWarning):
        fit = H.fit_slope(n, [1e-2, 0.0, 1e-3, 1e-4, 1e-5])
    assert fit.used == 4
    with pytest.raises(ValueError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            H.fit_slope(n, [1e-2, 0.0, -1.0, 1e-4, 1e-5])


def test_config_validation():
    with pytest.raises(ValueError):
        H.StudyConfig(n_grid=(32.0, 16.0))
    with pytest.raises(ValueError):
        H.StudyConfig(trials=0)
    with pytest.raises(ValueError):
        H.StudyConfig(mode="bogus")
    assert H.StudyConfig(d=3).n_grid == tuple(2.0 ** k for k in range(4, 11))
    assert H.StudyConfig(d=2).n_grid[-1] == 2.0 ** 14


def test_u_grid():
    g = H.u_grid(2)
    assert g.shape == (256, 2)
    assert g.min() == 1.0 and g.max() == pytest.approx(math.sqrt(2))
    assert H.u_grid(1).shape == (16, 1)
    assert H.u_grid(3).shape[0] <= 256


def test_zero_function_study_is_degenerate():
    rep = H.run_deterministic_study(H.StudyConfig("zero", 2, n_grid=(16.0, 32.0, 64.0, 128.0),
                                                  u_grid=2))
    assert rep.degenerate
    assert all(r.mean_err == 0 and r.max_err == 0 for r in rep.rows)
    assert rep.slope("mean_err") is None


def test_deterministic_study_poly_bump():
    rep = H.run_deterministic_study(H.StudyConfig("poly-bump:r=2", 1,
                                                  n_grid=H.dyadic_grid(1, 4, 12)))
    assert len(rep.rows) == 9
    assert rep.slope("mean_err") <= -1.8
    assert rep.nodes_within_bound()
    assert all(r.max_err >= r.mean_err for r in rep.rows)


def test_randomized_study_rows_and_threads():
    cfg = H.StudyConfig("tent", 2, n_grid=(16.0, 32.0, 64.0, 128.0), mode="dilation-shift",
                        trials=20, seed=5)
    a = H.run_randomized_study(cfg)
    b = H.run_randomized_study(H.StudyConfig(**{**cfg.to_dict(), "threads": 3}))
    assert [r.as_tuple() for r in a.rows] == [r.as_tuple() for r in b.rows]
    for r in a.rows:
        assert r.max_err >= r.rms_err >= r.mean_err > 0
        assert r.ci_half > 0
    assert a.nodes_within_bound()
    with pytest.raises(ValueError):
        H.run_randomized_study(H.StudyConfig("tent", 2, n_grid=(16.0,)))


def test_transformed_study_requires_flag():
    with pytest.raises(ValueError):
        H.run_randomized_study(H.StudyConfig("boundary-poly", 2, mode="dilation-shift"))


def test_unbiasedness_small():
    cfg = H.StudyConfig("tent", 2, mode="dilation-shift", trials=2000, seed=1)
    rep = H.run_unbiasedness_test(cfg, 64.0)
    assert rep.passed and not rep.degenerate
    zero = H.run_unbiasedness_test(H.StudyConfig("zero", 2, mode="dilation-shift", trials=50), 64.0)
    assert zero.degenerate and zero.z is None
    with pytest.raises(ValueError):
        H.run_unbiasedness_test(H.StudyConfig("tent", 2, mode="dilation"), 64.0)


def test_variance_identity_small():
    rep = H.run_variance_identity_test("tent", scale(frolov_matrix(1), 16.0, [1.3]), 20_000)
    assert rep.passed and rep.relative_gap < 0.05
    zero = H.run_variance_identity_test("zero", scale(frolov_matrix(2), 16.0), 200)
    assert zero.mc_variance == 0.0 and zero.series == 0.0 and zero.passed


def test_bound_sanity():
    rep = H.run_deterministic_study(H.StudyConfig("tent", 2, n_grid=H.dyadic_grid(2, 4, 10),
                                                  u_grid=4))
    assert H.bound_sanity(rep, r=1)


def test_report_serialisation(tmp_path):
    rep = H.run_deterministic_study(H.StudyConfig("tent", 1, n_grid=(16.0, 32.0, 64.0, 128.0)))
    stem = str(tmp_path / "r")
    rep.save(stem)
    csv_text = (tmp_path / "r.csv").read_text()
    assert csv_text.splitlines()[0] == "n,mean_err,rms_err,max_err,mean_nodes,ci_half"
    assert len(csv_text.splitlines()) == 5
    import json
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["config"]["function"] == "tent" and "wall_clock" not in doc
    assert "wall_clock_s" in json.loads((tmp_path / "r.timing.json").read_text())
