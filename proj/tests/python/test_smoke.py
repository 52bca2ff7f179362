"""Smoke tests for the python bindings."""

import math

import pytest

adacp = pytest.importorskip("adacp")


def test_model_evaluation():
    m = adacp.ChangePointModel("stump", [0.5], [1.5], d0=0.5, sigma=0.1)
    assert adacp.evaluate_mu(m, 0.3) == 0.5
    assert adacp.evaluate_mu(m, 0.5) == 0.5  # boundary uses the left branch
    assert adacp.evaluate_mu(m, 0.7) == 1.5
    assert m.jump_gap() == pytest.approx(1.0)
    assert m.snr() == pytest.approx(10.0)


def test_model_validation():
    with pytest.raises(ValueError):
        adacp.ChangePointModel("stump", [1.0], [1.0], d0=0.5, sigma=0.1)


def test_fit_free_recovers_a_clean_split():
    x = [0.2, 0.4, 0.6, 0.8]
    y = [0.5, 0.5, 1.5, 1.5]
    fit = adacp.fit_free(x, y, 0.0, 1.0, "stump")
    assert fit["d_lo"] == 0.4
    assert fit["d_hi"] == 0.6
    assert fit["rss"] == pytest.approx(0.0)
    assert fit["beta_l"][0] == pytest.approx(0.5)
    assert fit["beta_u"][0] == pytest.approx(1.5)


def test_fit_fixed_straddle():
    fit = adacp.fit_fixed([0.45, 0.55], [0.5, 1.5], 0.0, 1.0, [0.5], [1.5], "stump")
    assert fit["d_av"] == pytest.approx(0.5)


def test_zeta_from_delta():
    assert adacp.zeta_from_delta(2, 0.001) == pytest.approx(0.001, rel=1e-12)
    psi = adacp.zeta_from_delta(3, 0.01)
    assert (1 - psi) ** 2 == pytest.approx(0.99, rel=1e-12)


def test_simulate_argmin_zero_noise():
    dl, du = adacp.simulate_argmin(jump=1.0, dist="none", paths=4000, seed=3)
    assert all(u > 0 for u in du)
    assert all(l < 0 for l in dl)
    width = sum(u - l for u, l in zip(du, dl)) / len(du)
    assert width == pytest.approx(2.0, rel=0.1)


def test_quantile_table_shape():
    q = adacp.estimate_quantiles(
        5.0, reps=20000, seed=9, prob_grid=[0.05, 0.25, 0.5, 0.75, 0.95]
    )
    assert q.snr == 5.0
    assert abs(q.quantile_dav(0.5)) < 0.1
    assert q.C(0.25) > 0
    assert q.quantile_dl(0.25) <= q.quantile_du(0.75)


def test_two_stage_run_brackets_the_jump(tmp_path):
    m = adacp.ChangePointModel("stump", [0.5], [1.5], d0=0.5, sigma=0.2)
    out = adacp.run_two_stage(
        m, n=200, zeta1=0.0025, seed=11, quantile_reps=100000, cache_dir=str(tmp_path)
    )
    est = out["estimate"]
    assert 0.4 < est["d_av"] < 0.6
    assert out["budget_used"] == 200
    lo1, hi1 = out["windows"][0]
    lo2, hi2 = out["windows"][1]
    assert hi2 - lo2 < hi1 - lo1
    ci = out["finite_sample_ci"]
    assert ci["lo"] < est["d_av"] < ci["hi"]
    assert math.isfinite(ci["lo"]) and math.isfinite(ci["hi"])
