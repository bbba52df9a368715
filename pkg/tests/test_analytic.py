import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tweezer_qc import analytic

xis = st.floats(1e-4, 10.0)


@given(xis)
def test_envelope_closed_form(xi):
    assert analytic.envelope_excitation(xi) == 4 * xi**2 / (1 + 4 * xi**2)


def test_envelope_limits():
    assert analytic.envelope_excitation(0.0) == 0.0
    assert analytic.envelope_excitation(np.inf) == 1.0


def test_transport_envelope_reference_point():
    assert analytic.envelope_excitation(0.016) == pytest.approx(1.02e-3, abs=1e-5)


@given(st.floats(1e-3, 0.5), st.floats(0.1, 10.0), st.floats(1.01, 20.0))
def test_rampup_time_inverse(xi, omega_o, ratio):
    t = analytic.rampup_time(xi, omega_o, ratio * omega_o)
    assert analytic.xi_for_rampup(t, omega_o, ratio * omega_o) == pytest.approx(xi, rel=1e-12)


@given(st.floats(1e-3, 0.5), st.floats(0.1, 10.0), st.floats(1.01, 20.0))
def test_frequency_profile_reaches_target(xi, omega_o, ratio):
    t = analytic.rampup_time(xi, omega_o, ratio * omega_o)
    assert analytic.frequency_profile(xi, omega_o, t) == pytest.approx(ratio * omega_o, rel=1e-9)


@settings(max_examples=50)
@given(st.floats(1e-3, 0.3), st.floats(0.1, 10.0))
def test_rampup_zeros_and_bound(xi, omega_o):
    zeros = analytic.rampup_zero_times(xi, omega_o, 3)
    assert np.all(np.diff(zeros) > 0)
    p = analytic.rampup_excitation(zeros, xi, omega_o)
    assert np.all(p <= 1e-12 * analytic.envelope_excitation(xi))
    t = np.linspace(0, 0.99 * analytic._pole(xi, omega_o), 400)
    assert np.all(analytic.rampup_excitation(t, xi, omega_o)
                  <= analytic.envelope_excitation(xi) * (1 + 1e-12))


def test_rampup_maxima_touch_envelope():
    xi, w = 0.05, 1.0
    z = analytic.rampup_zero_times(xi, w, 2)
    t = np.linspace(z[0], z[1], 20001)
    p = analytic.rampup_excitation(t, xi, w)
    assert p.max() == pytest.approx(analytic.envelope_excitation(xi), rel=1e-6)


def test_pole_is_rejected():
    with pytest.raises(analytic.PoleError):
        analytic.rampup_excitation(1.0, 1.0, 1.0)
    with pytest.raises(analytic.PoleError):
        analytic.frequency_profile(1.0, 1.0, 1.0)


@given(st.floats(1e-3, 1.0), st.floats(0.1, 5.0), st.floats(0.5, 50.0))
def test_transport_velocity_and_xi_agree(xi, sigma, omega):
    v, t = analytic.transport_velocity(xi, sigma, omega)
    assert v * t == pytest.approx(1.0)
    assert analytic.transport_xi(1.0, t, sigma, omega) == pytest.approx(xi, rel=1e-12)


@given(st.floats(1e-3, 1.0), st.floats(0.5, 50.0))
def test_transport_excitation_zero_spacing(xi, omega):
    # zeros recur every 2 pi / (omega sqrt(1 + 4 xi^2))
    period = 2 * np.pi / (omega * np.sqrt(1 + 4 * xi**2))
    t = period * np.arange(1, 5)
    env = analytic.envelope_excitation(xi)
    assert np.all(analytic.transport_excitation(t, xi, omega) <= 1e-12 * env)


def test_params_validation():
    with pytest.raises(ValueError):
        analytic.AdiabaticityParams(0.0, 1.0)
    with pytest.raises(ValueError):
        analytic.AdiabaticityParams(0.1, 2.0, omega_f=1.0)
    p = analytic.AdiabaticityParams(0.1, 1.0, omega_f=3.0)
    assert p.rampup_time == pytest.approx(analytic.rampup_time(0.1, 1.0, 3.0))
    with pytest.raises(ValueError):
        analytic.rampup_time(0.1, 2.0, 1.0)
