"""Two-level harmonic-oscillator model of tweezer ramp-up and transport.

Constant adiabaticity ``xi`` for a frequency ramp means
``d omega/dt = 4 sqrt(2) xi omega^2`` (gap ``2 omega``, matrix element
``hbar/sqrt 2``), and for a position ramp a constant velocity
``sqrt(2) xi sigma omega`` (gap ``omega``, matrix element
``hbar omega / (sqrt 2 sigma)``). Units are arbitrary but consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT2 = np.sqrt(2.0)


class PoleError(ValueError):
    """Time past the divergence of the constant-xi frequency ramp."""


@dataclass(frozen=True)
class AdiabaticityParams:
    xi: float
    omega_o: float
    omega_f: float | None = None
    sigma_o: float | None = None

    def __post_init__(self):
        if not self.xi > 0:
            raise ValueError("xi must be positive")
        if not self.omega_o > 0:
            raise ValueError("omega_o must be positive")
        if self.omega_f is not None and self.omega_f < self.omega_o:
            raise ValueError("only ramp-up (omega_f >= omega_o) is modeled")

    @property
    def rampup_time(self):
        return rampup_time(self.xi, self.omega_o, self.omega_f)


def envelope_excitation(xi):
    xi2 = 4 * np.asarray(xi, dtype=float) ** 2
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(xi2), 1.0, xi2 / (1 + xi2))


def rampup_time(xi, omega_o, omega_f):
    if omega_f < omega_o:
        raise ValueError("only ramp-up (omega_f >= omega_o) is modeled")
    return (1 - omega_o / omega_f) / (4 * SQRT2 * xi * omega_o)


def xi_for_rampup(t_r, omega_o, omega_f):
    """Invert :func:`rampup_time` for the adiabaticity factor."""
    if omega_f < omega_o:
        raise ValueError("only ramp-up (omega_f >= omega_o) is modeled")
    return (1 - omega_o / omega_f) / (4 * SQRT2 * t_r * omega_o)


def _pole(xi, omega_o):
    return 1.0 / (4 * SQRT2 * xi * omega_o)


def frequency_profile(xi, omega_o, t):
    t = np.asarray(t, dtype=float)
    if np.any(t >= _pole(xi, omega_o)):
        raise PoleError("t beyond the frequency-ramp pole")
    return omega_o / (1 - 4 * SQRT2 * xi * omega_o * t)


def rampup_excitation(t, xi, omega_o):
    t = np.asarray(t, dtype=float)
    if np.any(t >= _pole(xi, omega_o)):
        raise PoleError("t beyond the frequency-ramp pole")
    phase = np.sqrt(2 * xi**2 + 0.5) * np.log(1 - 4 * SQRT2 * t * xi * omega_o) / (4 * xi)
    return envelope_excitation(xi) * np.sin(phase) ** 2


def rampup_zero_times(xi, omega_o, count=3):
    """Ramp durations at which the oscillatory factor vanishes."""
    k = np.arange(1, count + 1)
    log_arg = np.exp(-k * np.pi * 4 * xi / np.sqrt(2 * xi**2 + 0.5))
    return (1 - log_arg) / (4 * SQRT2 * xi * omega_o)


def transport_velocity(xi, sigma_o, omega, distance=1.0):
    """Constant-xi speed and the time to cover ``distance``."""
    v = SQRT2 * xi * sigma_o * omega
    return v, distance / v


def transport_excitation(t, xi, omega):
    t = np.asarray(t, dtype=float)
    return envelope_excitation(xi) * np.sin(np.sqrt(1 + 4 * xi**2) * omega * t / 2) ** 2


def transport_xi(distance, duration, sigma_o, omega):
    """Adiabaticity of a constant-speed displacement."""
    return distance / duration / (SQRT2 * sigma_o * omega)
