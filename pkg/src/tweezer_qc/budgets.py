"""Error budgets: photon scattering, magnetic and intensity dephasing, pointing sensitivity.

Rates and times in this module are SI (1/s, s); depths are in lattice recoils.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import contourpy
import numpy as np

from .controls import ErrorInjection
from .potentials import (ResonanceError, TweezerSpec, line_frequencies, line_shifts,
                         state_quantum_numbers)
from .units import C0, H, HBAR, RB87, UNITS, zeeman_splitting_rate

log = logging.getLogger(__name__)

# far-detuned reference: 10 nm red of the 6P1/2 line
FAR_DETUNED_WAVELENGTH = RB87.lambda_half + 10e-9
# threshold quoted for surface-code style error correction, report context only
FAULT_TOLERANCE_THRESHOLD = 1e-2


@dataclass(frozen=True)
class LineContribution:
    """One atomic line's share of a light shift and the scattering it causes.

    ``rate_factor`` multiplies the rotating-wave estimate ``Gamma |V| / (hbar |Delta|)``
    and carries counter-rotating and frequency corrections for far-off-resonant light.
    """

    linewidth: float
    detuning: float
    shift: float
    rate_factor: float = 1.0

    def __post_init__(self):
        if not abs(self.detuning) > 2 * np.pi * self.linewidth:
            raise ResonanceError("detuning must exceed the linewidth")


@dataclass(frozen=True)
class ScatteringScenario:
    label: str
    depth: float
    lines: tuple
    exposure: float = 0.0

    def __post_init__(self):
        if self.exposure < 0:
            raise ValueError("exposure must be non-negative")


def scattering_rate(s: ScatteringScenario) -> float:
    """Photon scattering rate, ``sum Gamma_line |V_line| / (hbar |Delta_line|)``."""
    rate = 0.0
    for line in s.lines:
        gamma = 2 * np.pi * line.linewidth
        rate += line.rate_factor * gamma / abs(line.detuning) * abs(line.shift) / HBAR
    return float(rate)


def scattering_probability(rate, exposure):
    """Probability of at least one scattering event, ``1 - exp(-rate t)``."""
    if rate < 0 or exposure < 0:
        raise ValueError("rate and exposure must be non-negative")
    return float(-np.expm1(-rate * exposure))


def tweezer_scattering(wavelength, depth=500.0, polarization="linear", state="up",
                       pair="field-sensitive", exposure=0.0, label="tweezer", species=RB87):
    """Scattering from a blue tweezer near the 6P lines at a given trap depth.

    The line shares follow the two-line light-shift model; their sum is
    scaled to ``depth`` recoils for the addressed state.
    """
    spec = TweezerSpec(depth, wavelength=wavelength, polarization=polarization)
    v1, v2 = line_shifts(spec, state, 1.0, pair, species)
    scale = UNITS.energy_si(depth) / abs(v1 + v2)
    omega = 2 * np.pi * C0 / wavelength
    w1, w2 = line_frequencies(state_quantum_numbers(state, pair)[0], species)
    lines = (LineContribution(species.linewidth_half, omega - w1, v1 * scale),
             LineContribution(species.linewidth_three_half, omega - w2, v2 * scale))
    return ScatteringScenario(label, depth, lines, exposure)


def lattice_scattering(depth=50.0, axes=3, wavelength=1064e-9, exposure=0.0, species=RB87):
    """Scattering of far-red lattice light from the 5P doublet.

    The atom sits at the intensity maxima of ``axes`` standing waves, each
    shifting it by ``depth``. Both D lines get the D2 linewidth and the ideal
    1:2 strength ratio; counter-rotating terms are kept because the detuning
    is a sizable fraction of the optical frequency.
    """
    omega = 2 * np.pi * C0 / wavelength
    total = UNITS.energy_si(axes * depth)
    terms = []
    for lam, weight in ((species.lambda_d1, 1 / 3), (species.lambda_d2, 2 / 3)):
        w0 = 2 * np.pi * C0 / lam
        s = weight * (1 / (w0 - omega) + 1 / (w0 + omega))
        terms.append((w0, s))
    norm = sum(s for _, s in terms)
    lines = []
    for w0, s in terms:
        factor = (omega / w0) ** 3 * (1 + (w0 - omega) / (w0 + omega))
        lines.append(LineContribution(species.linewidth_d2, omega - w0, total * s / norm, factor))
    return ScatteringScenario("lattice", axes * depth, tuple(lines), exposure)


# ---------------------------------------------------------------- dephasing


@dataclass(frozen=True)
class DephasingScenario:
    field_noise: float = 0.0  # gauss
    rel_intensity_noise: float = 0.0
    hold: float = 100e-6  # seconds
    depth: float = 500.0  # recoils, for the intensity case

    def __post_init__(self):
        if min(self.field_noise, self.rel_intensity_noise, self.hold, self.depth) < 0:
            raise ValueError("dephasing inputs must be non-negative")


@dataclass(frozen=True)
class DephasingResult:
    splitting: float
    coherence_time: float
    error: float
    note: str = ""


def dephasing_budget(d: DephasingScenario, pair="field-sensitive") -> DephasingResult:
    """Coherence time ``h / Delta E`` from field noise and the error ``T_g / T_c``."""
    rate = zeeman_splitting_rate(pair)
    if rate == 0.0:
        return DephasingResult(0.0, np.inf, 0.0, "magic-field: no first-order field sensitivity")
    de = rate * d.field_noise * 1e-4
    if de == 0.0:
        return DephasingResult(0.0, np.inf, 0.0, "no field noise: infinite coherence time")
    t_c = H / de
    return DephasingResult(de, t_c, d.hold / t_c)


def intensity_dephasing(depth, rel_noise, hold):
    """Phase error in radians from a relative depth fluctuation over ``hold`` seconds."""
    if min(depth, rel_noise, hold) < 0:
        raise ValueError("inputs must be non-negative")
    return rel_noise * UNITS.energy_si(depth) * hold / HBAR


# ---------------------------------------------------------------- sensitivity map


@dataclass
class SensitivityMap:
    offsets_nm: np.ndarray
    scales: np.ndarray
    infidelity: np.ndarray  # shape (len(scales), len(offsets_nm))
    failures: dict = field(default_factory=dict)

    def minimum_cell(self):
        i, j = np.unravel_index(np.nanargmin(self.infidelity), self.infidelity.shape)
        return float(self.offsets_nm[j]), float(self.scales[i])

    def contours(self, levels=None):
        """Polylines ``{level: [array (m, 2) of (offset_nm, scale)]}``."""
        if levels is None:
            top = np.nanmax(self.infidelity)
            levels = 1e-3 * np.arange(1, int(top / 1e-3) + 1)
        gen = contourpy.contour_generator(self.offsets_nm, self.scales, self.infidelity)
        return {float(lv): [np.asarray(p) for p in gen.lines(lv)] for lv in levels}

    def extent_below(self, level=1e-3):
        """Largest |offset| and |scale - 1| among cells with infidelity below ``level``."""
        mask = self.infidelity < level
        if not mask.any():
            return np.nan, np.nan
        s, o = np.meshgrid(self.scales, self.offsets_nm, indexing="ij")
        return float(np.max(np.abs(o[mask]))), float(np.max(np.abs(s[mask] - 1)))


def _cell(args):
    setup, depth_c, pos_c, dx_nm, scale = args
    err = ErrorInjection(UNITS.to_length(dx_nm * 1e-9), scale)
    return setup.run(depth_c, pos_c, err).infidelity


def sensitivity_map(setup, coeffs, offsets_nm=None, scales=None, workers=1) -> SensitivityMap:
    """Band-map infidelity over a grid of static pointing offsets and intensity scales.

    ``setup`` is a :class:`~tweezer_qc.scenarios.BandMapSetup` and ``coeffs``
    the stacked depth and position harmonics. A cell whose simulation fails
    is recorded in ``failures`` and left as NaN.
    """
    offsets_nm = np.linspace(-10, 10, 21) if offsets_nm is None else np.asarray(offsets_nm)
    scales = np.linspace(0.99, 1.01, 21) if scales is None else np.asarray(scales)
    coeffs = np.asarray(coeffs, dtype=float)
    k = len(coeffs) // 2
    cells = [(setup, coeffs[:k], coeffs[k:], dx, s) for s in scales for dx in offsets_nm]
    # resolve the cached states once before fanning out
    setup.initial, setup.targets, setup.dt
    out = np.full(len(cells), np.nan)
    failures = {}
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_cell, c) for c in cells]
            for i, fut in enumerate(futures):
                try:
                    out[i] = fut.result()
                except Exception as exc:  # recorded, not fatal
                    failures[(cells[i][3], cells[i][4])] = repr(exc)
    else:
        for i, c in enumerate(cells):
            try:
                out[i] = _cell(c)
            except Exception as exc:
                failures[(c[3], c[4])] = repr(exc)
    if failures:
        log.warning("%d sensitivity cells failed", len(failures))
    return SensitivityMap(offsets_nm, scales, out.reshape(len(scales), len(offsets_nm)), failures)
