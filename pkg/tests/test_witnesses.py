import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bscollision import witnesses as w
from bscollision.scattering import ChannelParams, CoefficientSeries, c_series
from bscollision.witnesses import Verdict

NM_POINT = ChannelParams(0.5, 0.4)  # above r2 = r1 / (1 + r1) = 1/3


def _series(values):
    return CoefficientSeries(ChannelParams(0.5, 0.5), values)


def test_witness_series_invariant():
    with pytest.raises(ValueError):
        w.WitnessSeries("coefficient", np.ones(3), Verdict.MARKOVIAN, (2,), 2)
    with pytest.raises(ValueError):
        w.WitnessSeries("coefficient", np.ones(3), Verdict.NON_MARKOVIAN, (), 2)


def test_verdict_codes_round_trip():
    for v in Verdict:
        assert Verdict.from_code(v.code) is v


@pytest.mark.parametrize(
    "c_r, n_T, expected",
    [(1.0, 0.0, (0.0, 0.0)), (0.5, 0.0, (1.5, 0.0)), (1.2, 1.0, (-1.76, -0.88))],
)
def test_intermediate_map_eigenvalues(c_r, n_T, expected):
    m = w.intermediate_map(c_r * 0.4, 0.4, n_T)
    assert np.allclose(sorted(m.eigenvalues), sorted(expected), atol=1e-12)
    assert np.allclose(m.closed_form, expected, atol=1e-12)
    assert np.allclose(m.M, m.M.conj().T, atol=1e-12)
    assert m.is_cp == (c_r <= 1.0)


def test_intermediate_map_singular():
    with pytest.raises(w.SingularStepError):
        w.intermediate_map(0.3, 0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(
    c=st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
    n=st.floats(0.0, 10.0),
)
def test_intermediate_map_closed_form_property(c, n):
    m = w.intermediate_map(c, 1.0, n)
    assert np.allclose(sorted(m.eigenvalues), sorted(m.closed_form), atol=1e-10)


def test_classify_simple_series():
    assert w.classify_divisibility(_series([1, 0.8, 0.5, 0.5])).verdict is Verdict.MARKOVIAN
    nm = w.classify_divisibility(_series([1, 0.5, 0.6, 0.2, 0.3]))
    assert nm.verdict is Verdict.NON_MARKOVIAN
    assert nm.violation_steps == (2, 4)
    with pytest.raises(ValueError):
        w.classify_divisibility(_series([1]))


def test_classify_singular_and_zero_steps():
    s = w.classify_divisibility(_series([1, 0, 0, 0.3, 0.2]))
    assert s.verdict is Verdict.SINGULAR
    assert s.singular_steps == (3,) and s.violation_steps == ()
    # A singular step does not hide a later genuine revival.
    s = w.classify_divisibility(_series([1, 0, 0.3, 0.2, 0.25]))
    assert s.verdict is Verdict.NON_MARKOVIAN and s.violation_steps == (4,)


def test_classify_relative_tolerance_sees_late_revivals():
    tiny = _series([1, 1e-12, 1e-13, 5e-13])
    assert w.classify_divisibility(tiny).violation_steps == (3,)
    assert w.classify_divisibility(_series([1, 0.5, 0.5 * (1 + 1e-12)])).is_markovian


def test_no_memory_is_markovian():
    for r1 in (0.0, 0.3, 0.99):
        for phi in (0.0, 1.0, np.pi):
            s = w.classify_divisibility(c_series(200, ChannelParams(r1, 0.0, phi)))
            assert s.verdict is not Verdict.NON_MARKOVIAN


def test_weak_and_strong_memory_traces():
    weak = c_series(50, ChannelParams(0.1, 0.01))
    assert np.all(np.diff(weak.abs) < 0)
    strong = w.classify_divisibility(c_series(50, ChannelParams(0.1, 0.99)))
    assert strong.verdict is Verdict.NON_MARKOVIAN
    assert max(strong.violation_steps) <= 50


def test_slow_trace_stays_bounded():
    s = c_series(200, ChannelParams(0.99, 0.99, np.pi)).abs
    assert s.max() <= 1 + 1e-12 and s.min() > 0.0


@pytest.mark.parametrize("n_T", [0.0, 2.0])
def test_eigenvalue_route_matches_modulus_route(n_T, rng):
    for _ in range(40):
        p = ChannelParams(*rng.uniform(0, 1, 2), rng.uniform(0, 2 * np.pi), n_T)
        series = c_series(120, p)
        a = w.classify_divisibility(series)
        b = w.cp_divisibility(series, n_T)
        assert a.verdict is b.verdict
        assert a.violation_steps == b.violation_steps


def test_coarse_grain_windows():
    const = np.full(31, 0.7)
    assert np.allclose(w.coarse_grain(const, 10, inclusive=False), 0.7)
    assert np.allclose(w.coarse_grain(const, 10), 0.7 * 11 / 10)
    assert len(w.coarse_grain(const, 10)) == 3
    dec = np.linspace(1, 0, 61)
    assert np.all(np.diff(w.coarse_grain(dec, 6)) < 0)
    with pytest.raises(ValueError):
        w.coarse_grain(const, 0)
    with pytest.raises(ValueError):
        w.coarse_grain(const[:3], 5)


def test_coarse_grain_keeps_strong_memory_revivals():
    grains = w.coarse_grain(c_series(300, ChannelParams(0.1, 0.99, np.pi / 4)), 15)
    assert np.any(np.diff(grains) > 0)


def test_coarse_grain_averages_out_period_two_oscillation():
    # At phi = 0 the strong-memory trace alternates between ~r1 and a slowly
    # decaying envelope; a 16-sample window always holds 8 of each, so the
    # grains decay monotonically. A 15-sample window alternates 8/7 and does not.
    series = c_series(300, ChannelParams(0.1, 0.99))
    assert np.all(np.diff(w.coarse_grain(series, 15)) < 0)
    assert np.any(np.diff(w.coarse_grain(series, 15, inclusive=False)) > 0)


def test_entanglement_witness_basics():
    s = w.entanglement_revival_witness(NM_POINT, 60, xi=1.0)
    assert s.values[0] == pytest.approx(1.0, abs=1e-10)
    assert s.verdict is Verdict.NON_MARKOVIAN
    assert w.entanglement_revival_witness(ChannelParams(0.5, 0.0), 60).is_markovian
    with pytest.raises(ValueError):
        w.entanglement_revival_witness(NM_POINT, 60, xi=0.0)


def test_entanglement_witness_blind_above_threshold():
    hot = NM_POINT.replace(n_T=5 * w.threshold_temperature(0.5))
    s = w.entanglement_revival_witness(hot, 100)
    assert s.is_markovian
    assert not w.classify_divisibility(c_series(100, hot)).is_markovian


def test_entanglement_dies_and_stays_dead_when_hot():
    hot = ChannelParams(0.5, 0.2, 0.0, 1.0)
    s = w.entanglement_revival_witness(hot, 80)
    dead = np.flatnonzero(s.values == 0)
    assert dead.size and np.all(s.values[dead[0]:] == 0)


def test_concurrence_witness_matches_modulus():
    s = w.concurrence_witness(NM_POINT, 80)
    assert np.allclose(s.values, c_series(80, NM_POINT).abs, atol=1e-9)
    with pytest.raises(ValueError):
        w.concurrence_witness(NM_POINT.replace(n_T=0.1), 10)


@pytest.mark.parametrize("probes", ["squeezed", "coherent"])
def test_fidelity_witness_verdicts(probes):
    for p in (NM_POINT, ChannelParams(0.5, 0.2), ChannelParams(0.8, 0.9, np.pi, 1.0)):
        f = w.fidelity_witness(p.replace(n_T=0.5), 150, probes=probes)
        d = w.classify_divisibility(c_series(150, p))
        assert f.verdict is d.verdict


def test_fidelity_witness_memory_only_system():
    assert w.fidelity_witness(ChannelParams(0.0, 0.3), 50).verdict is Verdict.NON_MARKOVIAN


def test_fidelity_nondecreasing_when_markovian():
    s = w.fidelity_witness(ChannelParams(0.5, 0.2, 0.0, 0.3), 100)
    assert np.all(np.diff(s.values) >= -1e-10)


def test_relative_entropy_witness_matches_fidelity():
    for p in (NM_POINT.replace(n_T=0.2), ChannelParams(0.5, 0.2, 0.0, 0.2)):
        s = w.relative_entropy_witness(p, 150)
        f = w.fidelity_witness(p, 150)
        assert s.verdict is f.verdict
        if s.is_markovian:
            assert np.all(np.diff(s.values) <= 1e-10)


def test_relative_entropy_witness_reports_infinite_steps():
    # At n_T = 0 and L = 0 the second probe is pure.
    s = w.relative_entropy_witness(NM_POINT, 20)
    assert 0 in s.infinite_steps and np.isinf(s.values[0])
    r = w.relative_entropy_witness(NM_POINT, 20, reverse=True)
    assert r.verdict is s.verdict


def test_identical_probes_rejected():
    with pytest.raises(ValueError):
        w.fidelity_witness(NM_POINT, 10, xi1=0.5, xi2=0.5)
    with pytest.raises(ValueError):
        w.relative_entropy_witness(NM_POINT, 10, xi1=0.5, xi2=0.5)
    with pytest.raises(ValueError):
        w.fidelity_witness(NM_POINT, 10, probes="cat")


def test_threshold_temperature():
    assert w.threshold_temperature(0.0) == 0.0
    assert w.threshold_temperature(0.5) == pytest.approx(1 / 3)
    assert w.threshold_temperature(0.9) == pytest.approx(0.81 / 0.19)
    assert w.threshold_temperature(1.0) == float("inf")
    with pytest.raises(ValueError):
        w.threshold_temperature(1.5)


def test_revival_to_infinite_relative_entropy_is_detected():
    # r2 = 1: no leakage from the memory, |c_L| alternates between r1 and 1
    # and the probes are pure again on every even step.
    s = w.relative_entropy_witness(ChannelParams(0.3, 1.0), 20)
    assert s.infinite_steps == tuple(range(0, 21, 2))
    assert s.violation_steps == tuple(range(2, 21, 2))
    # Constant infinity is no revival.
    s = w.relative_entropy_witness(ChannelParams(1.0, 0.4), 20)
    assert s.is_markovian and len(s.infinite_steps) == 21


def test_nan_in_witness_series_is_an_error():
    with pytest.raises(FloatingPointError):
        w._revivals(np.array([1.0, np.nan]), 1e-10, increasing=False)


def test_tiny_coefficients_keep_their_revivals():
    # Near the phi = pi boundary the first revival comes after |c_L| < 1e-14.
    s = w.classify_divisibility(c_series(200, ChannelParams(0.5, 0.08, np.pi)))
    assert s.violation_steps[0] == 31
    assert abs(c_series(31, ChannelParams(0.5, 0.08, np.pi)).values[30]) < 1e-14
