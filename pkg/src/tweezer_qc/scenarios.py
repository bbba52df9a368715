"""Ready-made simulations: ramp-up, single- and multi-site transport, band mapping.

Each setup object precomputes the grid, initial states, target states and time
step once, so that scans and optimizer objectives only pay for propagation.
Durations are given in microseconds at this level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.signal import detrend

from . import analytic
from .controls import (BandMapSpec, ErrorInjection, bandmap_ramp, inject_errors, rampdown_ramp,
                       rampup_ramp, transport_ramp)
from .dynamics import (DomainOverflowError, Grid, default_timestep, excitation_probability,
                       localized_state, overlap_fidelity, WaveFunction, propagate, propagate_many,
                       stationary_states, wannier_state)
from .potentials import LatticeSpec, PotentialField, TweezerSpec, trap_frequency
from .units import UNITS


@dataclass(frozen=True)
class Resolution:
    """Grid density and time step, as points per lattice site and steps per trap period."""

    points_per_site: int = 256
    per_period: int = 100

    def doubled(self):
        return Resolution(2 * self.points_per_site, 2 * self.per_period)


DEFAULT_RESOLUTION = Resolution()
# cheaper setting for optimizer objectives; results are re-checked at the default
SEARCH_RESOLUTION = Resolution(128, 50)


def _localized(field, grid, center, level):
    """Localized eigenstate near ``center``, enlarging the solve until it is found."""
    n = 8
    while True:
        eig = stationary_states(field, grid, n)
        try:
            return localized_state(eig, center, level)
        except Exception:
            if n >= 64:
                raise
            n *= 2


# ---------------------------------------------------------------- ramp-up


@dataclass
class RampupPoint:
    duration_us: float
    numeric: float
    envelope: float
    harmonic: float


@dataclass
class RampupSetup:
    """Tweezer ramped from zero onto a lattice site loaded with one atom."""

    v_target: float = 500.0
    lattice: LatticeSpec = field(default_factory=LatticeSpec)
    waist: float = 0.5
    resolution: Resolution = DEFAULT_RESOLUTION

    @cached_property
    def grid(self):
        return Grid.for_span(0.0, 0.0, points_per_site=self.resolution.points_per_site)

    @cached_property
    def final_field(self):
        return PotentialField((self.lattice, TweezerSpec(self.v_target, self.waist)))

    @cached_property
    def initial(self):
        return wannier_state(PotentialField((self.lattice,)), self.grid)

    @cached_property
    def reference(self):
        return stationary_states(self.final_field, self.grid, 3)

    @cached_property
    def dt(self):
        return default_timestep(self.final_field, per_period=self.resolution.per_period)

    @cached_property
    def frequencies(self):
        omega_o, _ = trap_frequency(PotentialField((self.lattice,)))
        omega_f, _ = trap_frequency(self.final_field)
        return omega_o, omega_f

    def run(self, duration_us) -> RampupPoint:
        t = UNITS.from_us(duration_us)
        ramp = rampup_ramp(self.v_target, t, self.lattice, self.waist)
        field_t = PotentialField((self.lattice, ramp.tweezer(self.waist)))
        final = propagate(self.initial, field_t, (0.0, t), self.dt).final
        omega_o, omega_f = self.frequencies
        xi = analytic.xi_for_rampup(t, omega_o, omega_f)
        return RampupPoint(duration_us, excitation_probability(final, self.reference),
                           float(analytic.envelope_excitation(xi)),
                           float(analytic.rampup_excitation(t, xi, omega_o)))


def rampup_scan(durations_us, setup: RampupSetup | None = None):
    setup = setup or RampupSetup()
    return [setup.run(t) for t in durations_us]


# ---------------------------------------------------------------- transport


@dataclass
class TransportSetup:
    """Tweezer of constant depth carrying an atom one site to the right."""

    depth: float = 500.0
    lattice: LatticeSpec = field(default_factory=LatticeSpec)
    waist: float = 0.5
    resolution: Resolution = DEFAULT_RESOLUTION

    @cached_property
    def grid(self):
        return Grid.for_span(0.0, 1.0, points_per_site=self.resolution.points_per_site)

    def _well(self, center):
        return PotentialField((self.lattice, TweezerSpec(self.depth, self.waist, center)))

    @cached_property
    def initial(self):
        return stationary_states(self._well(0.0), self.grid, 1).ground

    @cached_property
    def reference(self):
        return stationary_states(self._well(1.0), self.grid, 6)

    @cached_property
    def dt(self):
        return default_timestep(self._well(0.0), per_period=self.resolution.per_period)

    def ramp(self, duration_us, coeffs=()):
        return transport_ramp(UNITS.from_us(duration_us), coeffs, self.depth)

    def final_state(self, duration_us, coeffs=()):
        ramp = self.ramp(duration_us, coeffs)
        field_t = PotentialField((self.lattice, ramp.tweezer(self.waist)))
        return propagate(self.initial, field_t, (0.0, ramp.duration), self.dt).final

    def excitation(self, duration_us, coeffs=()):
        return excitation_probability(self.final_state(duration_us, coeffs), self.reference)


def transport_scan(durations_us, setup: TransportSetup | None = None, coeffs=()):
    setup = setup or TransportSetup()
    return [setup.excitation(t, coeffs) for t in durations_us]


# ---------------------------------------------------------------- multi-site


@dataclass
class MultisiteResult:
    sites: np.ndarray
    excitation: np.ndarray

    @property
    def single_site(self):
        return float(self.excitation[0])

    @property
    def max_ratio(self):
        return float(np.max(self.excitation) / self.excitation[0])

    def dominant_period(self, longest=None):
        """Period (in sites) of the strongest Fourier component of P_e(n).

        A linear trend is removed first and periods longer than ``longest``
        (a quarter of the run by default) are ignored, so that slow drifts do
        not mask the oscillation. Returns NaN when the run is too short to
        hold any admissible period.
        """
        y = detrend(self.excitation)
        longest = longest or len(y) / 4
        freqs = np.fft.rfftfreq(len(y))
        power = np.abs(np.fft.rfft(y)) ** 2
        keep = freqs >= 1.0 / longest
        if not keep.any():
            return float("nan")
        power[~keep] = 0.0
        return float(1.0 / freqs[int(np.argmax(power))])


def multisite_transport(coeffs, transport_us=25.0, n_max=100, setup: TransportSetup | None = None,
                        ramps=False, rampup_us=11.0):
    """Error after ``n`` repetitions of a single-site ramp, for n = 1..n_max.

    By default the atom starts in the tweezer ground state and the error is
    measured against the tweezer ground state on site ``n``, as for a single
    transport. With ``ramps`` the tweezer is first ramped up on a lattice atom
    and each ``n`` ends with its own ramp-down; the error is then measured
    against the lowest-band state on site ``n``. The box spans the whole path,
    so population left behind in the lattice stays behind.
    """
    setup = setup or TransportSetup()
    lattice, waist, depth = setup.lattice, setup.waist, setup.depth
    pps = setup.resolution.points_per_site
    grid = Grid.for_span(0.0, float(n_max), points_per_site=pps)
    dt = setup.dt
    t_r = UNITS.from_us(rampup_us)
    if ramps:
        local = Grid.for_span(0.0, 0.0, points_per_site=pps)
        target0 = _embed(wannier_state(PotentialField((lattice,)), local, 0.0), grid)
        up = rampup_ramp(depth, t_r, lattice, waist)
        psi = propagate(target0, PotentialField((lattice, up.tweezer(waist))), (0.0, t_r),
                        dt).final
    else:
        target0 = _embed(setup.initial, grid)
        psi = target0

    base = setup.ramp(transport_us, coeffs)
    out = []
    for n in range(1, n_max + 1):
        ramp = transport_ramp(base.duration, coeffs, depth, start=float(n - 1))
        psi = propagate(psi, PotentialField((lattice, ramp.tweezer(waist))),
                        (0.0, base.duration), dt, check_edges=False).final
        landed = psi
        if ramps:
            down = rampdown_ramp(depth, t_r, lattice, waist, center=float(n))
            landed = propagate(psi, PotentialField((lattice, down.tweezer(waist))), (0.0, t_r),
                               dt, check_edges=False).final
        out.append(1.0 - overlap_fidelity(landed, target0.shifted(n, pps)))
    return MultisiteResult(np.arange(1, n_max + 1), np.array(out))


def _embed(psi, grid):
    """Copy a wavefunction onto a larger grid with the same spacing."""
    out = np.zeros(grid.n_points, dtype=complex)
    i0 = grid.index(psi.grid.x_min)
    out[i0:i0 + psi.grid.n_points] = psi.psi
    return WaveFunction(grid, out)


# ---------------------------------------------------------------- band mapping


@dataclass
class BandMapOutcome:
    fidelity_moved: float
    fidelity_static: float
    clamped: bool
    trajectories: tuple = ()

    @property
    def infidelity(self):
        return 1.0 - self.fidelity_moved * self.fidelity_static


@dataclass
class BandMapSetup:
    """Atom carried from the left site into the first excited level of the right well."""

    spec: BandMapSpec = field(default_factory=BandMapSpec)
    lattice: LatticeSpec = field(default_factory=LatticeSpec)
    resolution: Resolution = DEFAULT_RESOLUTION

    @property
    def duration(self):
        return self.spec.duration

    @cached_property
    def grid(self):
        return Grid.for_span(self.spec.left, self.spec.right,
                             points_per_site=self.resolution.points_per_site)

    def field(self, depth_coeffs=(), pos_coeffs=(), errors=ErrorInjection()):
        moved, aux = bandmap_ramp(self.spec, self.duration, depth_coeffs, pos_coeffs)
        moved = inject_errors(moved, errors)
        w = self.spec.waist
        return PotentialField((self.lattice, moved.tweezer(w), aux.tweezer(w))), moved

    @cached_property
    def _states(self):
        start, _ = self.field()
        end = start.at(self.duration)
        start = start.at(0.0)
        return (_localized(start, self.grid, self.spec.left, 0),
                _localized(start, self.grid, self.spec.right, 0),
                _localized(end, self.grid, self.spec.right, 0),
                _localized(end, self.grid, self.spec.right, 1))

    @property
    def initial(self):
        return self._states[0], self._states[1]

    @property
    def targets(self):
        """Ground and first excited state of the merged well."""
        return self._states[2], self._states[3]

    @cached_property
    def dt(self):
        start, _ = self.field()
        return default_timestep(start.at(0.0), self.spec.left,
                                per_period=self.resolution.per_period)

    def run(self, depth_coeffs=(), pos_coeffs=(), errors=ErrorInjection(), frames=2):
        fld, moved = self.field(depth_coeffs, pos_coeffs, errors)
        a, b = propagate_many(list(self.initial), fld, (0.0, self.duration), self.dt, frames)
        ground, excited = self.targets
        return BandMapOutcome(overlap_fidelity(a.final, excited),
                              overlap_fidelity(b.final, ground), moved.clamped, (a, b))

    def objective(self, x):
        """Infidelity for stacked coefficients ``[depth..., position...]``.

        Returns ``(value, clamped)``; an atom pushed out of the box counts as lost.
        """
        k = len(x) // 2
        try:
            out = self.run(x[:k], x[k:])
        except DomainOverflowError:
            return 1.0, True
        return out.infidelity, out.clamped
