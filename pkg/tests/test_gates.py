import numpy as np
import pytest
from hypothesis import given, strategies as st

from tweezer_qc import gates
from tweezer_qc.dynamics import Grid, ShapeError, Trajectory, WaveFunction
from tweezer_qc.gates import (SINGLET_TRIPLET, NoGateError, QubitState, StepDurations,
                              TwoQubitState, closed_form_total_us, gate_budget,
                              interaction_energy, merge_gate_phase_time, phase_gate_time,
                              sequence_total_us, spin_dependent_gate_sequence,
                              spin_exchange_evolve, swap_times, transverse_factor)
from tweezer_qc.units import MASS, UNITS

amplitudes = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def random_state(draw_list):
    amp = np.array(draw_list, dtype=complex)
    return TwoQubitState(amp / np.linalg.norm(amp))


def gaussian(grid, sigma, x0=0.0):
    psi = np.exp(-((grid.x - x0) ** 2) / (4 * sigma**2)).astype(complex)
    return WaveFunction(grid, psi).normalized()


# ---------------------------------------------------------------- interaction energy


def test_gaussian_overlap_integral():
    # two identical Gaussians: int |psi|^4 = 1 / (2 sqrt(pi) * sqrt(2) sigma)
    grid = Grid(-2.0, 2.0, 1024)
    sigma = 0.07
    psi = gaussian(grid, sigma)
    w = 30.0
    u = interaction_energy(psi, psi, a_s=0.01, transverse=w)
    expected = 4 * np.pi * 0.01 / MASS * (MASS * w / (2 * np.pi)) / (2 * np.sqrt(np.pi) * sigma)
    assert u == pytest.approx(expected, rel=1e-10)


def test_interaction_energy_is_symmetric_and_norm_free():
    grid = Grid(-2.0, 2.0, 512)
    a, b = gaussian(grid, 0.07), gaussian(grid, 0.1, 0.05)
    u = interaction_energy(a, b, transverse=(30.0, 20.0))
    assert interaction_energy(b, a, transverse=(30.0, 20.0)) == pytest.approx(u)
    scaled = WaveFunction(grid, 3 * a.psi)
    assert interaction_energy(scaled, b, transverse=(30.0, 20.0)) == pytest.approx(u)


def test_interaction_energy_needs_transverse_and_same_grid():
    g = Grid(-2.0, 2.0, 512)
    with pytest.raises(ValueError):
        interaction_energy(gaussian(g, 0.1), gaussian(g, 0.1))
    with pytest.raises(ShapeError):
        interaction_energy(gaussian(g, 0.1), gaussian(Grid(-2, 2, 256), 0.1), transverse=1.0)
    with pytest.raises(ValueError):
        transverse_factor((1.0, -1.0))


def test_transverse_pair_with_tweezer():
    bare = gates.transverse_pair()
    assert bare[0] == bare[1]
    radial, beam = gates.transverse_pair(500.0)
    assert beam == bare[0] and radial > beam


# ---------------------------------------------------------------- gate times


def test_phase_gate_time_at_6_khz():
    u = UNITS.hz_to_energy(6e3)
    assert UNITS.us(phase_gate_time(u)) == pytest.approx(83.33, abs=0.01)
    with pytest.raises(ValueError):
        phase_gate_time(0.0)


def test_merge_gate_time():
    u_cross = UNITS.hz_to_energy(6e3)
    t = merge_gate_phase_time(0.9 * u_cross, u_cross)
    assert UNITS.us(t) == pytest.approx(833.3, abs=0.1)
    with pytest.raises(NoGateError):
        merge_gate_phase_time(u_cross, u_cross)


def test_swap_times():
    s = swap_times(2.0)
    assert s.u_eg == pytest.approx(0.7)
    assert s.t_entangle == pytest.approx(np.pi / 0.7 / 2)
    with pytest.raises(ValueError):
        swap_times(-1.0)


# ---------------------------------------------------------------- spin algebra


def test_singlet_triplet_basis_is_unitary():
    assert np.allclose(SINGLET_TRIPLET @ SINGLET_TRIPLET.conj().T, np.eye(4))


def test_full_swap_exchanges_spins():
    u = 0.7
    t = np.pi / u
    out = spin_exchange_evolve(TwoQubitState.basis("ud"), u, t)
    target = TwoQubitState.basis("du").amplitudes
    assert abs(abs(np.vdot(target, out.amplitudes)) ** 2 - 1) < 1e-12
    assert np.max(np.abs(out.populations() - np.abs(target) ** 2)) < 1e-12


def test_half_swap_entangles_equally():
    u = 0.7
    out = spin_exchange_evolve(TwoQubitState.basis("ud"), u, np.pi / u / 2)
    p = out.populations()
    assert p[1] == pytest.approx(0.5, abs=1e-12) and p[2] == pytest.approx(0.5, abs=1e-12)
    # maximally entangled: reduced state is fully mixed
    m = out.amplitudes.reshape(2, 2)
    assert np.allclose(m @ m.conj().T, np.eye(2) / 2, atol=1e-12)


@given(st.lists(amplitudes, min_size=4, max_size=4).filter(
    lambda a: np.linalg.norm(np.array(a, dtype=complex)) > 1e-3), st.floats(0, 20), st.floats(0.1, 5))
def test_singlet_population_invariant_and_norm_kept(amps, t, u):
    psi = random_state(amps)
    out = spin_exchange_evolve(psi, u, t)
    assert abs(out.singlet_triplet()[0] - psi.singlet_triplet()[0]) < 1e-12
    assert out.norm == pytest.approx(1.0, abs=1e-12)


def test_product_and_validation():
    g = QubitState(1 / np.sqrt(2), 1 / np.sqrt(2))
    e = QubitState(1.0, 0.0)
    psi = TwoQubitState.product(g, e)
    assert np.allclose(psi.populations(), [0.5, 0, 0.5, 0])
    with pytest.raises(ValueError):
        QubitState(1.0, 1.0)
    with pytest.raises(KeyError):
        QubitState(1.0, 0.0, pair="bogus")
    with pytest.raises(ShapeError):
        TwoQubitState(np.ones(3) / np.sqrt(3))


# ---------------------------------------------------------------- band-map phase


def test_bandmap_phase_of_static_overlap():
    grid = Grid(-2.0, 2.0, 512)
    a, b = gaussian(grid, 0.07), gaussian(grid, 0.07)
    times = np.linspace(0.0, 2.0, 5)
    ta, tb = Trajectory(times, [a] * 5), Trajectory(times, [b] * 5)
    u = interaction_energy(a, b, transverse=30.0)
    assert gates.bandmap_interaction_phase(ta, tb, transverse=30.0) == pytest.approx(2.0 * u)
    with pytest.raises(ShapeError):
        gates.bandmap_interaction_phase(ta, Trajectory(times * 2, [b] * 5), transverse=30.0)


# ---------------------------------------------------------------- budgets


@pytest.mark.parametrize("n", range(0, 101))
def test_budgets_match_closed_forms(n):
    for gate in gates.GATES:
        assert gate_budget(gate, n).total_us == closed_form_total_us(gate, n)


def test_budget_table_and_errors():
    text = gate_budget("exchange", 1).table()
    assert "merge/split" in text and text.splitlines()[-1].startswith("overall")
    assert "347 us" in text
    with pytest.raises(KeyError):
        gate_budget("teleport", 1)
    with pytest.raises(ValueError):
        gate_budget("exchange", -1)


def test_spin_dependent_sequence_is_symmetric():
    for n in (0, 1, 3):
        steps = spin_dependent_gate_sequence(n)
        markers = [s.marker for s in steps if s.marker]
        assert markers == ["echo", "restore"]
        total = sequence_total_us(steps)
        expected = 2 * (3 * 11 + 25 * (n + 1)) + 83
        assert total == pytest.approx(expected)
        # the same transport and ramp count as the closed-form budget
        assert total == pytest.approx(gate_budget("transport-phase", n).total_us)
