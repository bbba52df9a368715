"""Static and driven 1D potentials: cosine lattice, Gaussian tweezers, light shifts.

Potential terms are small immutable callables ``term(x, t)`` returning the
energy in recoil units; :class:`PotentialField` sums them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .units import C0, MASS, QUBIT_PAIRS, RB87


class GeometryError(ValueError):
    """Requested point is not a trap minimum."""


class ResonanceError(ValueError):
    """Light tuned exactly onto an atomic line."""


class NoNullError(ValueError):
    """No spin-selective zero of the light shift between the lines."""


POLARIZATIONS = {"linear": 0, "sigma+": 1, "sigma-": -1}


@dataclass(frozen=True)
class LatticeSpec:
    depth: float = 50.0
    spacing: float = 1.0
    origin: float = 0.0
    wavelength: float = 1064e-9

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("lattice depth must be non-negative")

    def __call__(self, x, t=0.0):
        return self.depth * np.sin(np.pi * (np.asarray(x) - self.origin) / self.spacing) ** 2


@dataclass(frozen=True)
class TweezerSpec:
    depth: float = 500.0
    waist: float = 0.5
    center: float = 0.0
    wavelength: float = 420.86e-9
    polarization: str = "linear"

    def __post_init__(self):
        if self.waist <= 0:
            raise ValueError("waist must be positive")
        if self.depth < 0:
            raise ValueError("tweezer depth must be non-negative")
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"unknown polarization {self.polarization!r}")

    def __call__(self, x, t=0.0):
        return -self.depth * np.exp(-2 * (np.asarray(x) - self.center) ** 2 / self.waist**2)


@dataclass(frozen=True)
class DrivenTweezer:
    """Gaussian tweezer whose depth and center follow a control ramp."""

    ramp: object
    waist: float = 0.5

    def __call__(self, x, t=0.0):
        depth = self.ramp.depth(t)
        center = self.ramp.position(t)
        return -depth * np.exp(-2 * (np.asarray(x) - center) ** 2 / self.waist**2)


@dataclass(frozen=True)
class PotentialField:
    terms: tuple = ()

    def __call__(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        v = np.zeros_like(x)
        for term in self.terms:
            v = v + term(x, t)
        return v

    def __add__(self, other):
        if isinstance(other, PotentialField):
            return PotentialField(self.terms + other.terms)
        return PotentialField(self.terms + (other,))

    @property
    def is_static(self):
        return not any(isinstance(term, DrivenTweezer) for term in self.terms)

    def at(self, t):
        """Frozen snapshot of the field at time ``t``."""
        return PotentialField((_Frozen(self, t),))


@dataclass(frozen=True)
class _Frozen:
    field: PotentialField
    t: float

    def __call__(self, x, t=0.0):
        return self.field(x, self.t)


def lattice_potential(spec: LatticeSpec) -> PotentialField:
    return PotentialField((spec,))


def tweezer_potential(spec: TweezerSpec) -> PotentialField:
    return PotentialField((spec,))


def curvature(field, x0, t=0.0, step=1e-3):
    """Second derivative from the 5-point central stencil."""
    xs = x0 + step * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    v = field(xs, t)
    return (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * step**2)


def trap_frequency(field, site_center=0.0, t=0.0, step=1e-3):
    """Harmonic frequency and oscillator length at a trap minimum.

    Returns ``(omega, sigma)`` in internal units, with
    ``omega = sqrt(V''/m)`` and ``sigma = sqrt(hbar/(m omega))``.
    """
    k = curvature(field, site_center, t, step)
    if not k > 0:
        raise GeometryError(f"curvature {k:g} at x={site_center} is not a minimum")
    omega = np.sqrt(k / MASS)
    return omega, np.sqrt(1.0 / (MASS * omega))


def state_quantum_numbers(state, pair):
    if isinstance(state, tuple):
        return state
    if pair not in QUBIT_PAIRS:
        raise KeyError(pair)
    up, down = QUBIT_PAIRS[pair]
    return {"up": up, "down": down}[state]


def line_shifts(spec: TweezerSpec, state="down", intensity=1.0, pair="field-sensitive",
                species=RB87):
    """Light-shift contributions of the 6P1/2 and 6P3/2 lines, in joules.

    Standard alkali two-line model for detunings large compared with the
    excited hyperfine structure. The line strengths follow the ideal 1:2
    fine-structure ratio with the 6P3/2 reduced dipole, which places the
    sigma- null of |F=1, mF=-1> at 420.86 nm. Ground hyperfine energies
    shift each detuning.
    """
    f, mf = state_quantum_numbers(state, pair)
    g_f = {1: -0.5, 2: 0.5}[f]
    pgm = POLARIZATIONS[spec.polarization] * g_f * mf
    w1, w2 = line_frequencies(f, species)
    omega = 2 * np.pi * C0 / spec.wavelength
    d1 = omega - w1
    d2 = omega - w2
    if min(abs(d1), abs(d2)) <= 1e-12 * omega:
        raise ResonanceError(f"wavelength {spec.wavelength} is on resonance")
    gamma = 2 * np.pi * species.linewidth_three_half
    w_ref = 2 * np.pi * C0 / species.lambda_three_half
    prefactor = np.pi * C0**2 * gamma / (2 * w_ref**3) * intensity
    return prefactor * (1 - pgm) / d1, prefactor * (2 + pgm) / d2


def line_frequencies(f, species):
    """Angular transition frequencies from ground level F to 6P1/2, 6P3/2."""
    e_ground = (3 / 8 if f == 2 else -5 / 8) * 2 * np.pi * species.hyperfine_splitting
    w1 = 2 * np.pi * C0 / species.lambda_half - e_ground
    w2 = 2 * np.pi * C0 / species.lambda_three_half - e_ground
    return w1, w2


def detunings(wavelength, f=1, species=RB87):
    """Signed angular detunings (omega - omega_line) from the two lines."""
    omega = 2 * np.pi * C0 / wavelength
    w1, w2 = line_frequencies(f, species)
    return omega - w1, omega - w2


def light_shift(spec: TweezerSpec, state="down", intensity=1.0, pair="field-sensitive",
                species=RB87):
    """Signed ground-state light shift in joules (negative is attractive)."""
    v1, v2 = line_shifts(spec, state, intensity, pair, species)
    return v1 + v2


def null_wavelength(state="down", polarization="sigma-", pair="field-sensitive",
                    species=RB87):
    """Wavelength between the 6P lines where ``state`` sees no light shift."""
    if POLARIZATIONS.get(polarization, 0) == 0:
        raise NoNullError("a spin-selective null needs circular polarization")
    w1, w2 = line_frequencies(state_quantum_numbers(state, pair)[0], species)

    def shift(omega):
        spec = TweezerSpec(wavelength=2 * np.pi * C0 / omega, polarization=polarization)
        v1, v2 = line_shifts(spec, state, 1.0, pair, species)
        # scale-free so the root tolerance is meaningful
        return (v1 + v2) / (abs(v1) + abs(v2))

    eps = 1e-9 * (w2 - w1)
    lo, hi = w1 + eps, w2 - eps
    if np.sign(shift(lo)) == np.sign(shift(hi)):
        raise NoNullError(f"no null for {state} with {polarization}")
    omega = brentq(shift, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    return 2 * np.pi * C0 / omega


def depth_to_intensity(depth_joules, spec: TweezerSpec, state="down", pair="field-sensitive",
                       species=RB87):
    """Intensity (W/m^2) giving a light shift of magnitude ``depth_joules``."""
    return abs(depth_joules) / abs(light_shift(spec, state, 1.0, pair, species))

