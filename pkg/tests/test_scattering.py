import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bscollision.scattering import (
    ChannelParams,
    CoefficientSeries,
    DegenerateSpectrumError,
    build_full_scattering,
    build_step_matrix,
    c_closed_form,
    c_series,
    c_series_batch,
    eigen_reduced,
    is_degenerate,
    reduced_step_matrix,
)

unit = st.floats(0.0, 1.0)
phase = st.floats(0.0, 2 * np.pi)


@pytest.mark.parametrize(
    "kwargs",
    [dict(r1=-0.1, r2=0.5), dict(r1=0.5, r2=1.1), dict(r1=0.5, r2=0.5, phi=7.0),
     dict(r1=0.5, r2=0.5, n_T=-1), dict(r1=float("nan"), r2=0.5)],
)
def test_params_reject_out_of_range(kwargs):
    with pytest.raises(ValueError):
        ChannelParams(**kwargs)


def test_params_accept_two_pi_endpoint():
    assert ChannelParams(0.5, 0.5, 2 * np.pi).phi == 2 * np.pi


def test_step_matrix_rejects_bad_index():
    p = ChannelParams(0.3, 0.3)
    with pytest.raises(ValueError):
        build_step_matrix(0, 3, p)
    with pytest.raises(ValueError):
        build_step_matrix(4, 3, p)


@settings(max_examples=50, deadline=None)
@given(r1=unit, r2=unit, phi=phase, L=st.integers(1, 8))
def test_step_and_product_are_unitary(r1, r2, phi, L):
    p = ChannelParams(r1, r2, phi)
    eye = np.eye(L + 2)
    for j in range(1, L + 1):
        S = build_step_matrix(j, L, p)
        assert np.abs(S.conj().T @ S - eye).max() < 1e-12
    U = build_full_scattering(L, p)
    assert np.abs(U.conj().T @ U - eye).max() < 1e-10


def test_step_acts_only_on_three_modes():
    S = build_step_matrix(2, 4, ChannelParams(0.3, 0.6, 1.0))
    untouched = [2, 4, 5]
    assert np.allclose(S[np.ix_(untouched, untouched)], np.eye(3))
    assert np.allclose(S[untouched][:, [0, 1, 3]], 0)


def test_identity_limits():
    # r1 = 1: system decoupled, only the phase accumulates.
    p = ChannelParams(1.0, 0.4, 0.7)
    c = c_series(10, p).values
    assert np.allclose(c, np.exp(1j * 0.7 * np.arange(11)))
    # r1 = 0, r2 = 0: full swap on the first step.
    assert np.allclose(c_series(5, ChannelParams(0.0, 0.0)).values[1:], 0)


def test_phi_zero_first_two_coefficients():
    r1, r2 = 0.5, 0.6
    c = c_series(2, ChannelParams(r1, r2)).values
    assert c[1] == pytest.approx(r1)
    assert c[2] == pytest.approx(r1**2 + (1 - r1**2) * r2)


def test_series_matches_full_product():
    p = ChannelParams(0.37, 0.81, 2.2)
    c = c_series(12, p).values
    for L in range(1, 13):
        assert abs(build_full_scattering(L, p)[0, 0] - c[L]) < 1e-12


def test_product_ss_element_independent_of_order():
    p = ChannelParams(0.6, 0.7, 0.9)
    L = 6
    steps = [build_step_matrix(j, L, p) for j in range(1, L + 1)]
    forward = np.linalg.multi_dot(steps[::-1])
    backward = np.linalg.multi_dot(steps)
    assert abs(forward[0, 0] - backward[0, 0]) < 1e-12


@settings(max_examples=100, deadline=None)
@given(r1=unit, r2=st.floats(0.01, 1.0), phi=phase)
def test_eigenvalues_match_numpy(r1, r2, phi):
    p = ChannelParams(r1, r2, phi)
    lp, lm = eigen_reduced(p)
    ref = np.linalg.eigvals(reduced_step_matrix(p))
    assert np.allclose(sorted([lp, lm], key=lambda z: (z.real, z.imag)),
                       sorted(ref, key=lambda z: (z.real, z.imag)), atol=1e-10)
    assert abs(lp * lm - (-r2 * np.exp(1j * phi))) < 1e-12


@settings(max_examples=100, deadline=None)
@given(r1=unit, r2=unit, phi=phase, L=st.integers(0, 40))
def test_closed_form_matches_series(r1, r2, phi, L):
    p = ChannelParams(r1, r2, phi)
    lp, lm = eigen_reduced(p)
    if abs(lp - lm) < 1e-3:
        return  # the closed form loses digits near the degenerate point
    assert abs(c_closed_form(L, p) - c_series(L, p).values[L]) < 1e-9


@pytest.mark.parametrize("p", [ChannelParams(0.0, 0.0), ChannelParams(1.0, 1.0, np.pi)])
def test_degenerate_points_raise_but_series_works(p):
    assert is_degenerate(p)
    with pytest.raises(DegenerateSpectrumError):
        c_closed_form(3, p)
    assert np.all(np.isfinite(c_series(50, p).values))


def test_closed_form_near_double_root_stays_accurate():
    # On the phi = pi curve the discriminant vanishes up to rounding, so the
    # computed gap is ~1e-8 and the closed form is still used.
    p = ChannelParams(0.8, 0.25, np.pi)
    assert not is_degenerate(p)
    c = c_series(60, p).values
    assert max(abs(c_closed_form(L, p) - c[L]) for L in range(61)) < 1e-9


def test_degenerate_series_matches_product():
    p = ChannelParams(0.8, 0.25, np.pi)
    c = c_series(8, p).values
    for L in (1, 4, 8):
        assert abs(build_full_scattering(L, p)[0, 0] - c[L]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(r1=unit, r2=unit, phi=phase)
def test_coefficient_bounded_by_one(r1, r2, phi):
    assert np.all(c_series(60, ChannelParams(r1, r2, phi)).abs <= 1 + 1e-12)


def test_conjugate_phase_symmetry():
    a = c_series(40, ChannelParams(0.4, 0.7, 1.1)).values
    b = c_series(40, ChannelParams(0.4, 0.7, 2 * np.pi - 1.1)).values
    assert np.allclose(a, np.conj(b), atol=1e-12)


def test_batch_matches_scalar():
    r1 = np.array([0.1, 0.5, 0.9])
    r2 = np.array([[0.2], [0.7]])
    out = c_series_batch(r1, r2, 0.3, 15)
    assert out.shape == (2, 3, 16)
    for i in range(2):
        for j in range(3):
            ref = c_series(15, ChannelParams(r1[j], r2[i, 0], 0.3)).values
            assert np.allclose(out[i, j], ref, atol=1e-14)


def test_coefficient_series_is_read_only():
    s = c_series(5, ChannelParams(0.3, 0.3))
    assert len(s) == 6 and s.horizon == 5
    with pytest.raises(ValueError):
        s.values[0] = 2
    with pytest.raises(ValueError):
        CoefficientSeries(s.params, [])


def test_single_step_product_is_the_step():
    p = ChannelParams(0.3, 0.6, 0.4)
    assert np.allclose(build_full_scattering(1, p), build_step_matrix(1, 1, p))


def test_no_feedback_factorises():
    p = ChannelParams(0.7, 0.0, 1.3)
    c = c_series(100, p).values
    assert np.allclose(c, (0.7 * np.exp(1.3j)) ** np.arange(101), atol=1e-12)
    assert abs(build_full_scattering(5, p)[0, 0] - (0.7 * np.exp(1.3j)) ** 5) < 1e-12


def test_reduced_matrix_examples():
    A = reduced_step_matrix(ChannelParams(0.5, 0.4))
    assert np.allclose(A, [[0.5, np.sqrt(0.75)], [0.4 * np.sqrt(0.75), -0.2]])
    B = reduced_step_matrix(ChannelParams(1.0, 0.3, 0.9))
    assert np.allclose(B, [[np.exp(0.9j), 0], [0, -0.3]])


def test_eigenvalue_examples():
    lp, lm = eigen_reduced(ChannelParams(0.6, 0.0))
    assert np.allclose([lp, lm], [0.6, 0.0])
    lp, lm = eigen_reduced(ChannelParams(0.0, 0.25))
    assert np.allclose([lp, lm], [0.5, -0.5])


def test_eigenvalue_swap_leaves_closed_form_unchanged():
    # The closed form is symmetric in the two eigenvalues, so the branch of
    # the square root does not matter.
    from bscollision.scattering import _divided_power

    lp, lm = eigen_reduced(ChannelParams(0.4, 0.7, 2.0))
    for n in (1, 5, 17):
        assert abs(_divided_power(lp, lm, n) - _divided_power(lm, lp, n)) < 1e-12


def test_closed_form_small_cases():
    p = ChannelParams(0.45, 0.7, 0.8)
    assert c_closed_form(0, p) == 1
    assert abs(c_closed_form(1, p) - 0.45 * np.exp(0.8j)) < 1e-12
    q = ChannelParams(0.1, 0.99)
    assert abs(c_closed_form(3, q) - build_full_scattering(3, q)[0, 0]) < 1e-10
    with pytest.raises(ValueError):
        c_closed_form(-1, p)


def test_closed_form_long_horizon(rng):
    for _ in range(20):
        p = ChannelParams(*rng.uniform(0, 1, 2), rng.uniform(0, 2 * np.pi))
        c = c_series(1000, p).values
        err = max(abs(c_closed_form(L, p) - c[L]) for L in range(0, 1001, 37))
        assert err < 1e-9
