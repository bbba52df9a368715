"""Parameterized tweezer control ramps: depth and position versus time.

A :class:`ControlRamp` evaluates in closed form at any ``t``; times outside
``[0, duration]`` hold the endpoint values. Harmonic corrections use the
half-range sine basis ``sin(k pi t / T)``, which leaves both endpoints fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import analytic
from .potentials import DrivenTweezer, LatticeSpec, PotentialField, curvature, trap_frequency
from .units import MASS, UNITS

MAX_HARMONICS = 32


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, t, duration):
        return self.value + 0.0 * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class Linear:
    start: float
    end: float

    def __call__(self, t, duration):
        return self.start + (self.end - self.start) * np.asarray(t, dtype=float) / duration


@dataclass(frozen=True)
class ConstantXiDepth:
    """Tweezer depth keeping the adiabaticity of the combined trap constant.

    The trap curvature ``m omega(t)^2`` is split into the static background
    curvature and the tweezer's ``4 V_t / w^2``, with ``omega(t)`` the
    constant-xi frequency ramp.
    """

    xi: float
    omega_o: float
    background_curvature: float
    waist: float

    def __call__(self, t, duration):
        t = np.minimum(np.asarray(t, dtype=float), duration)
        omega = analytic.frequency_profile(self.xi, self.omega_o, t)
        return (MASS * omega**2 - self.background_curvature) * self.waist**2 / 4


@dataclass(frozen=True)
class Harmonics:
    base: object
    coeffs: tuple = ()

    def __call__(self, t, duration):
        t = np.asarray(t, dtype=float)
        out = self.base(t, duration)
        for k, c in enumerate(self.coeffs, start=1):
            if c:
                out = out + c * np.sin(k * np.pi * t / duration)
        return out


def harmonic_series(base, coeffs, duration=None):
    """``base(t) + sum_k c_k sin(k pi t / T)``; endpoint values are unchanged."""
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) > MAX_HARMONICS:
        raise ValueError(f"at most {MAX_HARMONICS} harmonics")
    return Harmonics(base, coeffs)


@dataclass(frozen=True)
class ErrorInjection:
    offset: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("intensity scale must be positive")


@dataclass(frozen=True)
class ControlRamp:
    """Tweezer depth (E_r) and center (a_lat) over ``[0, duration]``."""

    duration: float
    depth_profile: object
    position_profile: object
    errors: ErrorInjection = field(default_factory=ErrorInjection)

    def _clip(self, t):
        return np.clip(t, 0.0, self.duration)

    def raw_depth(self, t):
        return self.errors.scale * self.depth_profile(self._clip(t), self.duration)

    def depth(self, t):
        return np.maximum(self.raw_depth(t), 0.0)

    def position(self, t):
        return self.position_profile(self._clip(t), self.duration) + self.errors.offset

    def clamp_violation(self, samples=2001):
        """Most negative unclamped depth over the ramp (0 if none)."""
        t = np.linspace(0.0, self.duration, samples)
        return float(min(0.0, np.min(self.raw_depth(t))))

    @property
    def clamped(self):
        return self.clamp_violation() < 0

    def reversed(self):
        """Time-reversed ramp, ``f(T - t)``."""
        return ControlRamp(self.duration, _Reversed(self.depth_profile),
                           _Reversed(self.position_profile), self.errors)

    def sample(self, n=201):
        t = np.linspace(0.0, self.duration, n)
        return t, self.depth(t), self.position(t)

    def tweezer(self, waist=0.5):
        return DrivenTweezer(self, waist)


@dataclass(frozen=True)
class _Reversed:
    profile: object

    def __call__(self, t, duration):
        return self.profile(duration - np.asarray(t, dtype=float), duration)


def transport_ramp(duration, coeffs=(), depth=500.0, start=0.0, distance=1.0):
    """Constant-depth translation over ``distance`` plus position harmonics."""
    position = harmonic_series(Linear(start, start + distance), coeffs)
    return ControlRamp(duration, Constant(depth), position)


def rampup_ramp(v_target, duration, lattice=LatticeSpec(), waist=0.5, center=0.0):
    """Constant-xi ramp of a tweezer from zero to ``v_target`` on a lattice site."""
    if v_target <= 0:
        return ControlRamp(duration, Constant(0.0), Constant(center))
    bg = PotentialField((lattice,))
    k_bg = curvature(bg, center)
    omega_o, _ = trap_frequency(bg, center)
    omega_f = np.sqrt((k_bg + 4 * v_target / waist**2) / MASS)
    xi = analytic.xi_for_rampup(duration, omega_o, omega_f)
    return ControlRamp(duration, ConstantXiDepth(xi, omega_o, k_bg, waist), Constant(center))


def rampdown_ramp(v_start, duration, lattice=LatticeSpec(), waist=0.5, center=0.0):
    return rampup_ramp(v_start, duration, lattice, waist, center).reversed()


@dataclass(frozen=True)
class BandMapSpec:
    v_start: float = 400.0
    v_aux: float = 200.0
    duration_us: float = 75.0
    harmonics: int = 15
    left: float = -1.0
    right: float = 0.0
    waist: float = 0.5

    @property
    def duration(self):
        return UNITS.from_us(self.duration_us)

    def __post_init__(self):
        if self.harmonics < 0:
            raise ValueError("harmonics must be non-negative")
        if self.v_start < 0 or self.v_aux < 0:
            raise ValueError("depths must be non-negative")


def bandmap_ramp(spec: BandMapSpec, duration, depth_coeffs=(), pos_coeffs=()):
    """Transport tweezer (ramped down while moving) and static auxiliary tweezer."""
    depth = harmonic_series(Linear(spec.v_start, 0.0), depth_coeffs)
    position = harmonic_series(Linear(spec.left, spec.right), pos_coeffs)
    transport = ControlRamp(duration, depth, position)
    auxiliary = ControlRamp(duration, Constant(spec.v_aux), Constant(spec.right))
    return transport, auxiliary


def inject_errors(ramp: ControlRamp, err: ErrorInjection) -> ControlRamp:
    """Static pointing offset and intensity scale on a ramp."""
    return replace(ramp, errors=ErrorInjection(ramp.errors.offset + err.offset,
                                               ramp.errors.scale * err.scale))
