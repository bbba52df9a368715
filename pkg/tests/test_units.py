import numpy as np
import pytest
from scipy import constants as sc

from tweezer_qc.units import (KINETIC, MASS, RB87, UNITS, SpeciesData, UnitsError, UnitSystem,
                              UnsupportedStatesError, recoil_energy, zeeman_splitting_rate)


def test_recoil_energy_of_1064_lattice():
    # E_r/h for 87Rb at 1064 nm is about 2.03 kHz
    assert UNITS.recoil_frequency == pytest.approx(2027.8, rel=1e-4)
    assert UNITS.time * 1e6 == pytest.approx(78.486, rel=1e-4)


def test_internal_units_make_hbar_one():
    # hbar^2 / (2 m a^2) in recoils must equal the kinetic prefactor
    kin = sc.hbar**2 / (2 * RB87.mass * UNITS.length**2) / UNITS.energy
    assert kin == pytest.approx(KINETIC, rel=1e-12)
    assert MASS * KINETIC == pytest.approx(0.5)


def test_round_trips():
    for to, back, v in [(UNITS.to_length, UNITS.length_si, 3.7e-7),
                        (UNITS.to_energy, UNITS.energy_si, 1e-29),
                        (UNITS.to_time, UNITS.time_si, 2.5e-5)]:
        assert back(to(v)) == pytest.approx(v, rel=1e-14)
    assert UNITS.us(UNITS.from_us(11.0)) == pytest.approx(11.0)
    assert UNITS.energy_hz(UNITS.hz_to_energy(6000.0)) == pytest.approx(6000.0)


def test_recoil_energy_rejects_bad_input():
    with pytest.raises(UnitsError):
        recoil_energy(0.0, RB87.mass)
    with pytest.raises(UnitsError):
        recoil_energy(1e-6, -1.0)


def test_species_invariants():
    assert RB87.lambda_three_half < RB87.lambda_half
    assert RB87.a_updown == pytest.approx(RB87.a_upup / 0.9)
    with pytest.raises(UnitsError):
        SpeciesData(u_ratio=1.2)
    with pytest.raises(UnitsError):
        SpeciesData(lambda_half=400e-9)


def test_6p_linewidths_are_hundreds_of_khz():
    assert 1e5 < RB87.linewidth_half < 5e5
    assert 1e5 < RB87.linewidth_three_half < 5e5


def test_zeeman_rates():
    # |F=2,-2> vs |F=1,-1> differ by 1.5 mu_B, about 2.1 MHz/G
    rate = zeeman_splitting_rate("field-sensitive")
    assert rate / sc.h * 1e-4 == pytest.approx(2.1e6, rel=0.01)
    assert zeeman_splitting_rate("clock") == 0.0
    with pytest.raises(UnsupportedStatesError):
        zeeman_splitting_rate("nonsense")


def test_other_lattice_wavelength_scales_as_inverse_square():
    other = UnitSystem(lattice_wavelength=2 * 1064e-9)
    assert other.energy == pytest.approx(UNITS.energy / 4)
