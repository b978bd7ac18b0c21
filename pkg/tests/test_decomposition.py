import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single_wave_series
from logiwave.cwt import DETAIL_ALPHAS
from logiwave.decomposition import (ConvergenceWarning, DecompositionConfig, coordinate_search,
                                    decompose, detect_waves, noise_floor, refine_parameters,
                                    sse, subtract_wave)
from logiwave.model import (LogisticWave, MultilogisticModel, eval_multilogistic,
                            eval_multilogistic_derivative)
from logiwave.synthetic import synthesize
from logiwave.timeseries import SeriesError, TimeSeries, first_difference

SMALL = DecompositionConfig(max_waves=2, alpha_grid=tuple(DETAIL_ALPHAS[:13]),
                            carrier_alpha_grid=tuple(np.arange(1.0, 21.0)))


def test_config_validation():
    with pytest.raises(ValueError):
        DecompositionConfig(max_waves=0)
    with pytest.raises(ValueError):
        DecompositionConfig(stop_r2=0.0)
    with pytest.raises(ValueError):
        DecompositionConfig(stop_r2=1.5)
    DecompositionConfig(stop_r2=1.0)


def test_subtract_wave_both_spaces():
    w = LogisticWave(3.0, 50.0, 900.0)
    m = MultilogisticModel(c=2.0, d=1.0, waves=[w])
    t = np.arange(1.0, 101.0)
    monthly = TimeSeries(eval_multilogistic_derivative(m, t), t)
    np.testing.assert_allclose(subtract_wave(monthly, w).values, 1.0, atol=1e-12)
    totals = TimeSeries(eval_multilogistic(m, t), t)
    np.testing.assert_allclose(subtract_wave(totals, w, space="cumulative").values,
                               2.0 + t, atol=1e-10)
    with pytest.raises(ValueError):
        subtract_wave(monthly, w, space="other")


def test_detect_single_wave():
    x = single_wave_series(6.0, 120.0, -4000.0, 250, d=3.0)
    found = detect_waves(first_difference(x))
    top = found[0]
    assert top.y_sat < 0
    assert abs(top.a - 6.0) <= 0.5 and abs(top.b - 120.0) <= 1
    assert top.y_sat == pytest.approx(-4000.0, rel=0.02)


def test_noise_floor_is_per_row():
    x = synthesize(MultilogisticModel(d=1.0), n=80, noise_sigma=1.0, seed=3)
    from logiwave.cwt import scalogram
    sc = scalogram(first_difference(x), [1.0, 2.0, 4.0])
    np.testing.assert_allclose(noise_floor(sc), 3 * np.median(np.abs(sc.values), axis=1))


def test_coordinate_search_quadratic():
    f = lambda p: (p[0] - 1.5) ** 2 + 10 * (p[1] + 2.0) ** 2
    x, ok = coordinate_search(f, np.zeros(2), np.full(2, -5.0), np.full(2, 5.0),
                              step0=np.ones(2))
    assert ok
    np.testing.assert_allclose(x, [1.5, -2.0], atol=1e-7)
    x, ok = coordinate_search(f, np.zeros(2), np.array([-5.0, -1.0]), np.full(2, 5.0),
                              step0=np.ones(2))
    assert x[1] == -1.0  # held at the bound
    _, ok = coordinate_search(f, np.zeros(2), np.full(2, -5.0), np.full(2, 5.0),
                              step0=np.ones(2), max_evals=5)
    assert not ok


def test_refine_recovers_perturbed_wave():
    truth = MultilogisticModel(d=2.0, waves=[LogisticWave(5.0, 80.0, 3000.0)])
    x = synthesize(truth, n=160)
    start = MultilogisticModel(d=0.0, waves=[LogisticWave(6.0, 83.0, 2500.0)])
    for method in ("trf", "coordinate"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            got = refine_parameters(x, start, method=method, max_evals=20000)
        w = got.waves[0]
        assert w.a == pytest.approx(5.0, rel=1e-3), method
        assert w.b == pytest.approx(80.0, abs=1e-2), method
        assert w.y_sat == pytest.approx(3000.0, rel=1e-3), method
        assert got.d == pytest.approx(2.0, abs=1e-2), method


def test_refine_warns_at_cap():
    x = single_wave_series(5.0, 80.0, 3000.0, 160)
    start = MultilogisticModel(waves=[LogisticWave(6.0, 83.0, 2500.0)])
    with pytest.warns(ConvergenceWarning):
        refine_parameters(x, start, method="coordinate", max_evals=10)
    with pytest.raises(ValueError):
        refine_parameters(x, start, method="newton")


def test_refine_bounds_hold():
    x = single_wave_series(5.0, 80.0, 3000.0, 160)
    start = MultilogisticModel(waves=[LogisticWave(20.0, 40.0, 3000.0)])
    w = refine_parameters(x, start).waves[0]
    assert 10.0 <= w.a <= 40.0 and 1.0 <= w.b <= 100.0 and w.y_sat >= 0


def test_decompose_too_short():
    with pytest.raises(SeriesError):
        decompose(TimeSeries(np.arange(10.0)))


def test_constant_monthly_series_gives_no_waves():
    # monthly values constant <=> running totals affine with slope d
    m, report = decompose(TimeSeries(np.full(100, 13.9)))
    assert m.waves == ()
    assert m.d == pytest.approx(13.9, abs=1e-12)
    assert math.isnan(report.r_squared) and report.rmse < 1e-12
    assert report.to_dict()["r_squared"] is None


def test_noise_free_reconstruction():
    truth = MultilogisticModel(d=5.0, waves=[LogisticWave(4.0, 60.0, 3000.0),
                                             LogisticWave(8.0, 150.0, -6000.0),
                                             LogisticWave(2.5, 220.0, 1200.0)])
    x = synthesize(truth, n=300)
    m, report = decompose(x)
    assert report.r_squared >= 0.9999
    pred = eval_multilogistic_derivative(m, x.t)
    assert 1 - np.sum((x.values - pred) ** 2) / np.sum((x.values - x.values.mean()) ** 2) \
        >= 0.9999
    assert [w.id for w in m.waves] == ["1", "2", "3"]
    amps = [abs(w.amplitude) for w in m.waves]
    assert amps == sorted(amps, reverse=True)


def test_intercept_matches_running_totals():
    truth = MultilogisticModel(d=1.0, waves=[LogisticWave(4.0, 60.0, 3000.0)])
    x = synthesize(truth, n=150)
    m, _ = decompose(x)
    totals = np.cumsum(x.values)
    fitted = eval_multilogistic(m, x.t)
    assert np.mean(totals - fitted) == pytest.approx(0.0, abs=1e-6)


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    waves = [LogisticWave(rng.uniform(1.5, 5), rng.uniform(15, 45), rng.uniform(-800, 800))]
    return synthesize(MultilogisticModel(d=rng.uniform(-3, 3), waves=waves), n=60,
                      noise_sigma=rng.uniform(0, 5), seed=seed)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["trf", "coordinate"]))
def test_refinement_monotone(seed, method):
    rng = np.random.default_rng(seed)
    x = _random_instance(seed)
    start = MultilogisticModel(d=rng.uniform(-5, 5), waves=[
        LogisticWave(rng.uniform(1, 6), rng.uniform(10, 50), rng.uniform(-1000, 1000))])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        got = refine_parameters(x, start, method=method, max_evals=300)
    assert sse(x, got) <= sse(x, start)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_decompose_deterministic(seed):
    x = _random_instance(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        a = decompose(x, SMALL)
        b = decompose(x, SMALL)
    assert a[0] == b[0]
    assert np.array_equal(a[1].residuals, b[1].residuals)
