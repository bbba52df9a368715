"""Physical constants, 87Rb species data and the lattice-recoil unit system.

Every other module works in internal units:

* length in lattice spacings ``a_lat = lambda_lat / 2``
* energy in recoil energies ``E_r = h**2 / (2 m lambda_lat**2)``
* time in ``hbar / E_r``

With these choices ``hbar = 1``, the kinetic prefactor ``hbar**2 / 2m`` equals
``1 / pi**2`` and the mass is ``pi**2 / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import constants as sc

H = sc.h
HBAR = sc.hbar
C0 = sc.c
EPS0 = sc.epsilon_0
MU_B = sc.physical_constants["Bohr magneton"][0]
A0 = sc.physical_constants["Bohr radius"][0]
AMU = sc.physical_constants["atomic mass constant"][0]

# internal-unit kinetic prefactor hbar^2/(2m) and mass
KINETIC = 1.0 / np.pi**2
MASS = np.pi**2 / 2.0

QUBIT_PAIRS = {
    # (F, mF) for |up>, |down>
    "field-sensitive": ((2, -2), (1, -1)),
    "merge": ((1, 1), (2, -1)),
    "clock": ((2, 1), (1, -1)),
}

MAGIC_FIELD_G = 3.229


class UnitsError(ValueError):
    """Invalid physical input (non-positive mass, wavelength, ...)."""


class UnsupportedStatesError(KeyError):
    """Unknown qubit-pair identifier."""


def _reduced_dipole_linewidth(wavelength, dipole_ea0, j_upper):
    """Partial decay rate (rad/s) of an E1 line from its reduced matrix element."""
    omega = 2 * np.pi * C0 / wavelength
    d = dipole_ea0 * sc.e * A0
    return omega**3 * d**2 / (3 * np.pi * EPS0 * HBAR * C0**3 * (2 * j_upper + 1))


@dataclass(frozen=True)
class SpeciesData:
    """Static data for 87Rb used throughout the package (SI units).

    The 6P linewidths are partial 6P -> 5S decay rates, derived from the
    5s-6p reduced dipole matrix elements of Safronova, Williams and Clark,
    PRA 69, 022509 (2004): 0.325 e a0 (6P1/2) and 0.528 e a0 (6P3/2).
    Scattering lengths: 100.4 a0 background (van Kempen et al., PRL 88,
    093201 (2002)); the inter-state value is set by the 0.9 interaction
    ratio near the 9.1 G Feshbach resonance (Widera et al. 2004).
    """

    name: str = "87Rb"
    mass: float = 86.909180527 * AMU
    hyperfine_splitting: float = 6.834682610904e9
    lambda_half: float = 421.555e-9
    lambda_three_half: float = 420.1733e-9
    linewidth_half: float = field(
        default_factory=lambda: _reduced_dipole_linewidth(421.555e-9, 0.325, 0.5) / (2 * np.pi)
    )
    linewidth_three_half: float = field(
        default_factory=lambda: _reduced_dipole_linewidth(420.1733e-9, 0.528, 1.5) / (2 * np.pi)
    )
    # 5S-5P lines, only used for the lattice scattering estimate
    lambda_d1: float = 794.978851e-9
    lambda_d2: float = 780.241209e-9
    linewidth_d2: float = 6.0666e6
    mu_b: float = MU_B
    a_upup: float = 100.4 * A0
    a_downdown: float = 100.4 * A0
    u_ratio: float = 0.9
    feshbach_field_g: float = 9.12

    def __post_init__(self):
        if self.mass <= 0:
            raise UnitsError("mass must be positive")
        if not self.lambda_three_half < self.lambda_half:
            raise UnitsError("fine-structure lines out of order")
        if not 0 < self.u_ratio < 1:
            raise UnitsError("u_ratio must lie in (0, 1)")

    @property
    def a_updown(self):
        return self.a_upup / self.u_ratio

    @property
    def scattering_length(self):
        """Default s-wave scattering length for same-well collisions."""
        return self.a_upup


RB87 = SpeciesData()


def recoil_energy(wavelength, mass):
    """h^2 / (2 m lambda^2) in joules."""
    if wavelength <= 0 or mass <= 0:
        raise UnitsError("wavelength and mass must be positive")
    return H**2 / (2 * mass * wavelength**2)


def zeeman_splitting_rate(states="field-sensitive", species=RB87):
    """First-order d(Delta E)/dB of a qubit pair in J/T.

    Returns 0 for the clock pair, which is field-insensitive to first order
    at the magic field.
    """
    if states not in QUBIT_PAIRS:
        raise UnsupportedStatesError(states)
    if states == "clock":
        return 0.0
    (f_up, m_up), (f_dn, m_dn) = QUBIT_PAIRS[states]
    g = {1: -0.5, 2: 0.5}
    return abs(g[f_up] * m_up - g[f_dn] * m_dn) * species.mu_b


@dataclass(frozen=True)
class UnitSystem:
    """Conversion between SI and lattice-recoil units."""

    lattice_wavelength: float = 1064e-9
    species: SpeciesData = RB87

    @property
    def length(self):
        return self.lattice_wavelength / 2

    @property
    def energy(self):
        return recoil_energy(self.lattice_wavelength, self.species.mass)

    @property
    def time(self):
        return HBAR / self.energy

    @property
    def recoil_frequency(self):
        """E_r / h in Hz."""
        return self.energy / H

    # SI -> internal
    def to_length(self, meters):
        return meters / self.length

    def to_energy(self, joules):
        return joules / self.energy

    def to_time(self, seconds):
        return seconds / self.time

    def to_angular(self, rad_per_s):
        return rad_per_s * self.time

    def hz_to_energy(self, hz):
        return H * hz / self.energy

    # internal -> SI
    def length_si(self, x):
        return x * self.length

    def energy_si(self, e):
        return e * self.energy

    def time_si(self, t):
        return t * self.time

    def angular_si(self, w):
        return w / self.time

    def energy_hz(self, e):
        """Internal energy expressed as E/h in Hz."""
        return e * self.energy / H

    def us(self, t):
        """Internal time in microseconds."""
        return self.time_si(t) * 1e6

    def from_us(self, microseconds):
        return self.to_time(microseconds * 1e-6)

    def describe(self):
        """Ordered key/value pairs for the constants dump."""
        sp = self.species
        return {
            "species": sp.name,
            "mass_kg": sp.mass,
            "hyperfine_splitting_hz": sp.hyperfine_splitting,
            "lambda_6p1/2_m": sp.lambda_half,
            "lambda_6p3/2_m": sp.lambda_three_half,
            "linewidth_6p1/2_hz": sp.linewidth_half,
            "linewidth_6p3/2_hz": sp.linewidth_three_half,
            "a_upup_m": sp.a_upup,
            "a_downdown_m": sp.a_downdown,
            "a_updown_m": sp.a_updown,
            "u_ratio": sp.u_ratio,
            "lattice_wavelength_m": self.lattice_wavelength,
            "length_unit_m": self.length,
            "energy_unit_j": self.energy,
            "recoil_frequency_hz": self.recoil_frequency,
            "time_unit_s": self.time,
            "zeeman_rate_hz_per_g": zeeman_splitting_rate("field-sensitive", sp) * 1e-4 / H,
        }


UNITS = UnitSystem()
