import json
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conres import analysis as a
from conres.errors import (EmptySchedule, MissingEntry, NonpositiveDiam, NonpositiveDmax,
                           NonpositiveL, TooFewPoints)
from conres.models import Resonance


def test_bar_t_affine_schedule():
    sched = a.SmoothingSchedule(tuple((N, 2 * N + 5) for N in range(1, 101)))
    bt = a.bar_t(sched)
    assert bt.value == pytest.approx(2.05)
    assert bt.limit == pytest.approx(2.0)
    assert bt.subadditive and bt.violations == ()


def test_bar_t_single_entry_and_empty():
    assert a.bar_t(a.SmoothingSchedule(((4, 8),))).value == 2
    with pytest.raises(EmptySchedule):
        a.bar_t(a.SmoothingSchedule(()))


def test_bar_t_flags_subadditivity_violation():
    with pytest.warns(a.SubadditivityWarning):
        bt = a.bar_t(a.SmoothingSchedule(((1, 1.0), (2, 3.0))))
    assert not bt.subadditive
    assert bt.violations == ((1, 1, 2),)


def test_bar_t_infimum_monotone_under_new_entries():
    sched = a.SmoothingSchedule(((2, 7.0), (5, 12.0)))
    more = sched.with_entry(9, 15.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", a.SubadditivityWarning)
        assert a.bar_t(more).value <= a.bar_t(sched).value


def test_strip_from_smoothing_example():
    sched = a.SmoothingSchedule(((6, Fraction(10)),), R0=Fraction(1), R1=Fraction(2))
    pred = a.strip_from_smoothing(sched, 6, Fraction(1, 100))
    assert pred.width == Fraction(5, 18) - Fraction(1, 100)
    assert float(pred.width) == pytest.approx(0.26778, abs=1e-5)


def test_strip_from_smoothing_clamps_and_missing():
    sched = a.SmoothingSchedule(((1, 3.0), (6, 10.0)))
    with pytest.warns(a.ClampWarning):
        assert a.strip_from_smoothing(sched, 1, 0.01).width == 0
    with pytest.warns(a.ClampWarning):
        assert a.strip_from_smoothing(sched, 6, 1.0).width == 0
    with pytest.raises(MissingEntry):
        a.strip_from_smoothing(sched, 7, 0.01)


def test_strip_width_grows_with_n_on_linear_schedule():
    sched = a.SmoothingSchedule(tuple((N, Fraction(3, 2) * N) for N in range(1, 40)))
    widths = [a.strip_from_smoothing(sched, N, Fraction(1, 1000)).width for N in range(2, 40)]
    assert widths == sorted(widths)
    assert a.strip_from_smoothing(sched, 5, Fraction(1, 1000)).asymptote == \
        Fraction(2, 3) - Fraction(1, 1000)


def test_smoothing_from_strip_examples():
    assert a.smoothing_from_strip(2, 1, 3, 10) == 8
    assert a.smoothing_from_strip(1, 0, 0, 0) == 2
    ratios = [a.smoothing_from_strip(2, 1, 3, 10 * k) / (10 * k) for k in (1, 10, 1000)]
    assert abs(ratios[-1] - 0.5) < abs(ratios[0] - 0.5)
    with pytest.raises(NonpositiveL):
        a.smoothing_from_strip(0, 1, 1, 1)


def test_conic_formulas():
    free = a.conic_strip(2, 5.0)
    assert free.width == pytest.approx(0.1)
    assert "upper bound on width" in free.notes[-1]
    assert a.conic_strip(3, 1.0, capped=False).width == 1.0
    with pytest.raises(NonpositiveDmax):
        a.conic_strip(2, 0.0)
    band = a.conic_band(2, 2.0, delta=0.05)
    assert band.width == pytest.approx(0.3)
    assert band.asymptote == 0.25
    assert isinstance(a.conic_band(2, -math.inf), a.EmptyBand)
    assert a.conic_band(2, 5.0).width == free.width


def test_delta_obstacle_strip():
    assert a.delta_obstacle_strip(2.0, 0.1).width == pytest.approx(0.4)
    assert a.delta_obstacle_strip(1.0, 0.0).width == 1.0
    with pytest.warns(a.ClampWarning):
        assert a.delta_obstacle_strip(1.0, 1.5).width == 0
    with pytest.raises(NonpositiveDiam):
        a.delta_obstacle_strip(0.0)


def test_bar_t_sentinels():
    assert a.strip_from_bar_t(0, 0.1).width == a.UNBOUNDED
    assert a.strip_from_bar_t(math.inf, 0.1).width == 0.1
    assert a.strip_from_bar_t(2.0, 0.1).width == pytest.approx(0.4)
    doc = a.strip_from_bar_t(0, 0.1).to_dict()
    assert json.loads(json.dumps(doc))["width"] == "inf"


def test_counting_function_examples():
    double = [Resonance(1 - 0.5j, 2)]
    assert a.counting_function(double, 2, 1) == 2
    assert a.counting_function(double, 2, 0.5) == 0
    assert a.counting_function([], 5, 1) == 0


@settings(max_examples=500, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-20, 0), st.integers(1, 3)),
                max_size=20),
       st.floats(1, 60), st.floats(0, 4))
def test_counting_function_brute_force(data, r, rho):
    res = [Resonance(complex(x, y), m) for x, y, m in data]
    expected = sum(m for x, y, m in data if abs(x) <= r and y >= -rho * math.log(r))
    assert a.counting_function(res, r, rho) == expected
    assert a.counting_function(res, r + 1, rho) >= expected
    assert a.counting_function(res, r, rho + 0.5) >= expected


def test_fit_log_strip_synthetic():
    n = np.arange(10, 201)
    exact = a.fit_log_strip(list(n - 1j * np.log(n)), re_window=(10, 200))
    assert exact.slope == pytest.approx(1.0, abs=1e-6)
    rng = np.random.default_rng(0)
    noisy = n - 2j * np.log(n) + 1j * rng.uniform(-0.01, 0.01, n.size)
    assert a.fit_log_strip(list(noisy), re_window=(10, 200)).slope == pytest.approx(2.0, rel=5e-3)
    flat = a.fit_log_strip(list(n - 3j), re_window=(10, 200))
    assert flat.slope == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(TooFewPoints):
        a.fit_log_strip([5 - 1j, 6 - 1j])


def test_fit_default_window_is_upper_half():
    n = np.arange(10, 201)
    fit = a.fit_log_strip(list(n - 1j * np.log(n)))
    assert fit.count == int(np.sum(n >= 105))


def test_poisson_trace():
    s = a.poisson_trace([Resonance(1 - 0.1j)], [2 * math.pi])
    assert abs(s[0]) == pytest.approx(math.exp(-0.2 * math.pi))
    assert np.all(a.poisson_trace([], np.linspace(0, 1, 5)) == 0)
    t = np.linspace(0, 3, 31)
    first = [Resonance(3 - 1j), Resonance(5 - 2j, 2)]
    second = [Resonance(7 - 0.5j)]
    assert np.array_equal(a.poisson_trace(first + second, t),
                          a.poisson_trace(first, t) + a.poisson_trace(second, t))


def test_verify_band_empty_set():
    report = a.verify_band([], a.delta_obstacle_strip(1.0), lambda0=1.0)
    assert report.check("free_region")["status"] == "PASS"
    assert report.check("band")["status"] == "NO_DATA"
    doc = json.loads(report.to_json())
    assert set(doc) >= {"checks", "fitted", "violators"}


def test_verify_band_on_two_delta_model():
    from conres import models
    from conres.scene import DeltaLineScene
    scene = DeltaLineScene((0.0, 1.0), (2.0, 2.0))
    res = models.scan_resonances(models.DeltaLineModel(scene), (0.5, 300.0), (-10.0, -0.01))
    base = a.delta_obstacle_strip(scene.diameter)
    narrow = a.StripPrediction(0.9 * base.width, 0.0, base.source)
    wide = a.StripPrediction(1.1 * base.width, 0.0, base.source)
    ok = a.verify_band(res, narrow, lambda0=50.0)
    assert ok.passed and not ok.violators
    assert ok.check("band")["status"] == "INFO"
    bad = a.verify_band(res, wide, lambda0=50.0)
    assert not bad.passed
    assert bad.violators and all(z.real > 50 for z in bad.violators)
    assert bad.min_lambda0 >= max(z.real for z in bad.violators)
    assert a.verify_band(res, wide, lambda0=bad.min_lambda0).passed


def test_verify_band_empty_band_prediction():
    report = a.verify_band([Resonance(3 - 1j)], a.EmptyBand(), 1.0)
    assert [c["status"] for c in report.checks] == ["NO_DATA", "NO_DATA"]


def test_log_envelope_keeps_least_damped():
    res = [Resonance(1.5 - 3j), Resonance(1.2 - 0.5j), Resonance(3.1 - 2j)]
    assert a.log_envelope(res) == [1.2 - 0.5j, 3.1 - 2j]
