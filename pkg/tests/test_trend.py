import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logiwave.model import LogisticWave
from logiwave.synthetic import reference_model
from logiwave.trend import (ChainError, amplitude, auto_group, extrapolate_next, fit_chain,
                            write_chains)


def wave_with_peak(i, b, peak, a=2.0):
    return LogisticWave(a=a, b=b, y_sat=4 * a * peak, id=str(i))


def test_amplitude_examples():
    assert amplitude(LogisticWave(40.7, 354, -201951)) == pytest.approx(-1240.5, abs=0.05)
    assert amplitude(LogisticWave(3.0, 1.0, 0.0)) == 0.0
    assert amplitude(LogisticWave(6.0, 1.0, 200.0)) == amplitude(LogisticWave(3.0, 1.0, 100.0))


def test_exact_line():
    waves = [wave_with_peak(i, b, 0.8 * b) for i, b in enumerate([10, 25, 40, 70])]
    c = fit_chain(waves, ["0", "1", "2", "3"])
    assert c.slope == pytest.approx(0.8) and c.intercept == pytest.approx(0.0, abs=1e-9)
    assert c.residual_rms == pytest.approx(0.0, abs=1e-9)
    assert c.ratios == pytest.approx((0.8,) * 4)
    assert c.reversal_flag


def test_two_point_extrapolation():
    waves = [wave_with_peak("p", 10, 5), wave_with_peak("q", 20, 9)]
    c = fit_chain(waves, ["p", "q"])
    assert extrapolate_next(c, 30) == pytest.approx(13.0)
    assert not c.reversal_flag


def test_chain_errors():
    waves = [wave_with_peak("p", 10, 5), wave_with_peak("q", 20, -9)]
    with pytest.raises(ChainError, match="two"):
        fit_chain(waves, ["p"])
    with pytest.raises(ChainError, match="sign"):
        fit_chain(waves, ["p", "q"])
    with pytest.raises(ChainError, match="unknown"):
        fit_chain(waves, ["p", "zz"])


def test_reference_negative_waves():
    neg = [w for w in reference_model().waves if w.y_sat < 0 and w.id not in ("A",)]
    chains = auto_group(neg)
    assert any(len(c.member_ids) >= 3 for c in chains)
    long = [c for c in chains if len(c.member_ids) >= 3]
    assert long[0].member_ids == ("11", "12", "13")
    assert long[0].slope < 0 and long[0].reversal_flag
    c = fit_chain(reference_model().waves, ["11", "12", "13"])
    assert c.member_ids == ("11", "12", "13")


def test_identical_ratios_form_one_chain():
    waves = [wave_with_peak(i, b, -0.5 * b) for i, b in enumerate([30, 60, 90, 150])]
    chains = auto_group(waves)
    assert len(chains) == 1 and chains[0].member_ids == ("0", "1", "2", "3")


def test_alternating_signs_never_mix():
    waves = [wave_with_peak(i, 10.0 * (i + 1), (-1) ** i * (1 + i)) for i in range(8)]
    for c in auto_group(waves):
        signs = {np.sign(w.y_sat) for w in waves if w.id in c.member_ids}
        assert len(signs) == 1


def test_alternating_signs_with_varying_ratios_give_nothing():
    peaks = [5, -1, 40, -30, 2, -90]
    waves = [wave_with_peak(i, 10.0 * (i + 1), p) for i, p in enumerate(peaks)]
    assert auto_group(waves) == []


def test_chain_json(tmp_path):
    waves = [wave_with_peak(i, b, 0.8 * b) for i, b in enumerate([10, 25, 40])]
    path = write_chains(auto_group(waves), tmp_path / "c.json")
    data = json.loads(path.read_text())
    assert set(data[0]) == {"chain_id", "member_ids", "slope", "intercept", "residual_rms",
                            "ratios", "reversal_flag"}
    assert data[0]["reversal_flag"] is True


wave_lists = st.lists(
    st.builds(lambda b, peak, a: (b, peak, a), st.floats(1, 500), st.floats(-1e3, 1e3)
              .filter(lambda v: abs(v) > 1e-3), st.floats(0.5, 20)),
    min_size=0, max_size=12)


@settings(max_examples=100, deadline=None)
@given(st.floats(1, 500), st.floats(-1e3, 1e3), st.floats(0.5, 20), st.floats(1, 500),
       st.floats(-1e3, 1e3), st.floats(0.5, 20))
def test_two_points_fit_exactly(b1, p1, a1, b2, p2, a2):
    if abs(b1 - b2) < 1e-3 or np.sign(p1) != np.sign(p2) or p1 == 0:
        return
    c = fit_chain([wave_with_peak("x", b1, p1, a1), wave_with_peak("y", b2, p2, a2)],
                  ["x", "y"])
    assert c.residual_rms <= 1e-9 * (abs(p1) + abs(p2))
    assert extrapolate_next(c, b1) == pytest.approx(p1, rel=1e-7, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(wave_lists, st.randoms(use_true_random=False))
def test_auto_group_permutation_invariant(rows, rnd):
    waves = [wave_with_peak(str(i), b, p, a) for i, (b, p, a) in enumerate(rows)]
    shuffled = waves[:]
    rnd.shuffle(shuffled)
    assert auto_group(waves) == auto_group(shuffled)


@settings(max_examples=100, deadline=None)
@given(wave_lists, st.floats(-100, 600))
def test_extrapolation_is_the_line(rows, b_next):
    waves = [wave_with_peak(str(i), b, p, a) for i, (b, p, a) in enumerate(rows)]
    for c in auto_group(waves):
        assert extrapolate_next(c, b_next) == c.slope * b_next + c.intercept
