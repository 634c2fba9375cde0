import json
import math

import pytest

import posteval as pe


def test_crps_examples():
    assert pe.crps_empirical([5.0], 2.0) == 3.0
    assert pe.crps_empirical([0.0, 1.0], 0.0) == 0.25
    assert pe.crps_point(-3.0, 4.0) == 7.0
    with pytest.raises(ValueError, match="empty ensemble"):
        pe.crps_empirical([], 0.0)


def test_histogram_and_spectrum_metrics():
    edges = [0.0, 1.0, 2.0]
    truth = pe.build_histogram([0.5] * 100 + [1.5] * 100, edges)
    pred = pe.build_histogram([0.5] * 90 + [1.5] * 110, edges)
    assert truth.counts == [100, 100]
    r = pe.spectrum_chi2(pred, truth)
    assert r["chi2"] == pytest.approx(2.0)
    assert r["ndf"] == 1
    spike = pe.build_histogram([0.5], edges)
    other = pe.build_histogram([1.5], edges)
    assert pe.emd_1d(spike, other) == pytest.approx(1.0)


def test_conformal_examples():
    assert pe.conformal_threshold([0.1 * i for i in range(1, 10)], 0.1) == pytest.approx(0.9)
    assert math.isinf(pe.conformal_threshold([1.0, 2.0, 3.0], 0.01))
    assert pe.coverage_curve([1.0, 2.0, 3.0], [1.5, 2.5], [0.5]) == [0.5]
    alphas = pe.alpha_grid()
    assert len(alphas) == 99
    assert pe.calibration_deviance(alphas, [1 - a for a in alphas]) == pytest.approx(0.0, abs=1e-12)


def test_distributions():
    g = pe.gaussian(0.0, 1.0)
    assert g.family == "gaussian"
    assert pe.nll_score(g, 0.0) == pytest.approx(0.9189385332046727)
    assert pe.Distribution.from_json(g.to_json()) == g
    with pytest.raises(ValueError, match="sigma must be positive"):
        pe.gaussian(0.0, -1.0)
    with pytest.raises(ValueError, match="no tractable density"):
        pe.nll_score(pe.point(0.0), 0.0)
    mix = pe.mixture([0.5, 0.5], [-2.0, 2.0], [0.2, 0.2])
    size, parts = pe.prediction_set_size(mix, 1.0)
    assert parts == 2 and 0 < size < 2


def test_synthetic_and_predictors():
    events = pe.generate_events(200, seed=7)
    assert events == pe.generate_events(200, seed=7)
    assert len(events) == 200
    post = pe.analytic_posterior(1.0)
    assert len(post["z"]) == 2001
    assert post["density"] == post["density"][::-1]
    m = pe.predict("mixture2", 4.0)
    d = json.loads(m.to_json())
    assert d["type"] == "mixture"
    assert d["weights"][0] == pytest.approx(0.5, abs=1e-10)
    assert d["means"][1] == pytest.approx(2.0, abs=0.1)
    assert abs(json.loads(pe.predict("point-mean", 9.0).to_json())["value"]) < 1e-10


def test_evaluate_report(tmp_path):
    events = pe.generate_events(600, seed=3)
    dists = pe.predict_all("gaussian", events)
    report = pe.evaluate(events, dists, n_cal=200, n_samples=50, seed=1)
    assert report["schema_version"] == pe.REPORT_SCHEMA_VERSION
    method = report["methods"][0]
    assert method["ndf"] == 49
    assert method["calibration"]["n_cal"] == 200
    assert report == pe.evaluate(events, dists, n_cal=200, n_samples=50, seed=1, threads=2)

    pe.write_events(tmp_path / "ev.csv", events)
    pe.write_predictions(tmp_path / "p.jsonl", events, dists)
    from_files = pe.evaluate_files(tmp_path / "ev.csv", tmp_path / "p.jsonl", n_cal=200, n_samples=50, seed=1)
    assert from_files["methods"][0]["mean_crps"] == method["mean_crps"]

    points = pe.predict_all("point-mean", events)
    assert pe.evaluate(events, points)["methods"][0]["calibration"] is None
    with pytest.raises(ValueError, match="n_cal"):
        pe.evaluate(events, dists, n_cal=600)
    with pytest.raises(KeyError):
        pe.evaluate(events, dists, bogus=1)


def test_crps_sweep():
    events = pe.generate_events(100, seed=2)
    dists = pe.predict_all("exact", events)
    rows = pe.crps_sweep(events, dists, [10, 100], seed=4)
    assert [r[0] for r in rows] == [10, 100]
    assert rows == pe.crps_sweep(events, dists, [10, 100], seed=4)
