"""Grids, stationary states, Bloch bands and split-operator propagation.

All quantities are in lattice-recoil units (see :mod:`tweezer_qc.units`), so
the Hamiltonian reads ``H = -(1/pi^2) d^2/dx^2 + V(x, t)`` with ``hbar = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft
from scipy.linalg import eigh_tridiagonal

from .potentials import DrivenTweezer, LatticeSpec, PotentialField, trap_frequency
from .units import KINETIC


class NumericError(RuntimeError):
    """Non-converged or non-finite numerical result."""


class DomainOverflowError(NumericError):
    """Wavefunction amplitude reached the edge of the simulation box."""


class ShapeError(ValueError):
    """Objects defined on different grids were combined."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid ``x_i = x_min + i * dx``, ``i < n_points``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise ValueError("n_points must be a power of two >= 64")
        if not self.x_max > self.x_min:
            raise ValueError("empty grid")

    @classmethod
    def for_span(cls, x_a, x_b, margin=3.5, points_per_site=256):
        """Box around a tweezer trajectory from ``x_a`` to ``x_b``.

        The width is rounded up to a power-of-two number of sites so that the
        lattice stays commensurate with the periodic box.
        """
        lo, hi = min(x_a, x_b), max(x_a, x_b)
        width = hi - lo + 2 * margin
        sites = 1 << int(np.ceil(np.log2(width - 1e-9)))
        pad = (sites - (hi - lo)) / 2
        return cls(lo - pad, hi + pad, sites * points_per_site)

    def refined(self, factor=2):
        return Grid(self.x_min, self.x_max, self.n_points * factor)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def dk(self):
        return 2 * np.pi / (self.x_max - self.x_min)

    @cached_property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_points)

    @cached_property
    def k(self):
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    def index(self, x0):
        return int(round((x0 - self.x_min) / self.dx))


@dataclass
class WaveFunction:
    grid: Grid
    psi: np.ndarray

    @property
    def norm(self):
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)

    @property
    def density(self):
        return np.abs(self.psi) ** 2

    def normalized(self):
        return WaveFunction(self.grid, self.psi / np.sqrt(self.norm))

    def inner(self, other):
        """<self|other>."""
        _check_grid(self.grid, other.grid)
        return complex(np.vdot(self.psi, other.psi) * self.grid.dx)

    def mean_position(self):
        return float(np.sum(self.grid.x * self.density) * self.grid.dx / self.norm)

    def shifted(self, sites, points_per_site=None):
        """Cyclic translation by an integer number of grid points per site."""
        pps = points_per_site or int(round(1 / self.grid.dx))
        return WaveFunction(self.grid, np.roll(self.psi, int(sites * pps)))

    def edge_probability(self, width=0.5):
        """Probability within ``width`` of either box edge."""
        n = max(1, int(round(width / self.grid.dx)))
        p = np.abs(self.psi) ** 2
        return float((p[:n].sum() + p[-n:].sum()) * self.grid.dx)


def _check_grid(a, b):
    if a != b:
        raise ShapeError("wavefunctions live on different grids")


@dataclass
class EigenSet:
    energies: np.ndarray
    states: list

    def __len__(self):
        return len(self.energies)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def ground(self):
        return self.states[0]

    @property
    def grid(self):
        return self.states[0].grid


def stationary_states(field, grid: Grid, n=4, t=0.0, tol=1e-8):
    """Lowest ``n`` eigenpairs of the finite-difference Hamiltonian.

    Second-order central stencil with hard walls at the box edges.
    """
    if n >= grid.n_points // 4:
        raise ValueError("too many states requested for this grid")
    v = np.asarray(field(grid.x, t), dtype=float)
    hop = KINETIC / grid.dx**2
    diag = v + 2 * hop
    off = -hop * np.ones(grid.n_points - 1)
    energies, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n - 1))

    hv = diag[:, None] * vecs
    hv[1:] += off[:, None] * vecs[:-1]
    hv[:-1] += off[:, None] * vecs[1:]
    residual = np.max(np.linalg.norm(hv - vecs * energies, axis=0))
    scale = max(1.0, np.max(np.abs(energies)))
    if not residual < tol * scale * 1e3:
        raise NumericError(f"eigensolver residual {residual:.3e}")

    states = []
    for j in range(n):
        vec = vecs[:, j]
        # deterministic sign: largest lobe positive
        if vec[np.argmax(np.abs(vec))] < 0:
            vec = -vec
        states.append(WaveFunction(grid, (vec / np.sqrt(grid.dx)).astype(complex)))
    return EigenSet(np.asarray(energies), states)


def localized_state(eigen: EigenSet, center, level=0, radius=0.5):
    """The ``level``-th eigenstate whose density is concentrated near ``center``."""
    found = -1
    for state in eigen.states:
        x = state.grid.x
        inside = np.abs(x - center) <= radius
        if np.sum(state.density[inside]) * state.grid.dx > 0.5:
            found += 1
            if found == level:
                return state
    raise NumericError(f"no localized level {level} near x={center}")


def wannier_state(field, grid: Grid, center=0.0, n_band=None, t=0.0):
    """Lowest-band state localized on the site at ``center``.

    Diagonalizes the position operator projected onto the lowest band (one
    state per site in the box); in 1D its eigenvectors are the maximally
    localized Wannier functions. Use it when the site is degenerate with its
    neighbors, e.g. a bare lattice.
    """
    if n_band is None:
        n_band = int(round(grid.x_max - grid.x_min))
    band = stationary_states(field, grid, n_band, t)
    vecs = np.array([s.psi for s in band.states]).T
    xop = vecs.conj().T @ (grid.x[:, None] * vecs) * grid.dx
    centers, rot = np.linalg.eigh(xop)
    j = int(np.argmin(np.abs(centers - center)))
    psi = vecs @ rot[:, j]
    psi = psi * np.exp(-1j * np.angle(psi[np.argmax(np.abs(psi))]))
    return WaveFunction(grid, psi).normalized()


@dataclass
class Bands:
    quasimomenta: np.ndarray
    energies: np.ndarray
    tunneling: float
    tight_binding: bool


def _band_energies(depth, q, n_basis):
    m = np.arange(-(n_basis // 2), n_basis // 2 + 1)
    out = np.empty((len(q), len(m)))
    off = -depth / 4 * np.ones(len(m) - 1)
    for i, qi in enumerate(q):
        diag = KINETIC * (qi + 2 * np.pi * m) ** 2 + depth / 2
        out[i] = eigh_tridiagonal(diag, off, eigvals_only=True)
    return out


def bloch_bands(lattice: LatticeSpec, n_q=33, n_basis=21, rtol=1e-6):
    """Bloch energies of ``V sin^2(pi x)`` in a plane-wave basis.

    ``tunneling`` is a quarter of the lowest-band width. For a vanishing
    lattice the tight-binding picture does not apply and it is NaN.
    """
    if n_basis < 21:
        raise ValueError("need at least 21 plane waves")
    q = np.linspace(-np.pi, np.pi, n_q)
    energies = _band_energies(lattice.depth, q, n_basis)
    if lattice.depth == 0:
        return Bands(q, energies, float("nan"), False)
    j = (energies[:, 0].max() - energies[:, 0].min()) / 4
    check = _band_energies(lattice.depth, np.array([0.0, np.pi]), 2 * n_basis + 1)
    j2 = (check[1, 0] - check[0, 0]) / 4
    if abs(j - j2) > rtol * abs(j2) + 1e-14:
        raise NumericError(f"band width not converged: {j:.6e} vs {j2:.6e}")
    return Bands(q, energies, float(j), True)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list = field(default_factory=list)

    @property
    def final(self):
        return self.states[-1]


def _split_field(field, x):
    static = np.zeros_like(x)
    driven = []
    for term in field.terms:
        if isinstance(term, DrivenTweezer):
            driven.append(term)
        else:
            static = static + term(x, 0.0)
    return static, driven


# beyond 5 waists a Gaussian is below 2e-22 of its peak
_WINDOW_WAISTS = 5.0


def _driven_window(driven, x, t):
    """Potential of the driven tweezers on the slice where it is non-negligible."""
    lo, hi = len(x), 0
    params = []
    for term in driven:
        depth = float(term.ramp.depth(t))
        center = float(term.ramp.position(t))
        if depth == 0.0:
            continue
        reach = _WINDOW_WAISTS * term.waist
        lo = min(lo, int(np.searchsorted(x, center - reach)))
        hi = max(hi, int(np.searchsorted(x, center + reach)))
        params.append((depth, center, term.waist))
    if hi <= lo:
        return 0, 0, None
    xs = x[lo:hi]
    v = np.zeros(hi - lo)
    for depth, center, waist in params:
        v -= depth * np.exp(-2 * (xs - center) ** 2 / waist**2)
    return lo, hi, v


def default_timestep(field, site_center=0.0, t=0.0, per_period=100):
    """Trap period at the given configuration divided by ``per_period``."""
    omega, _ = trap_frequency(field, site_center, t)
    return 2 * np.pi / omega / per_period


def _evolve(psi, grid, field, t0, t1, dt, keep):
    """Fused Strang steps on a stack of wavefunctions, shape ``(m, n_points)``.

    Consecutive half kinetic steps are merged, so each step costs one FFT
    pair. ``keep`` holds step indices whose states are returned.
    """
    n_steps = max(1, int(np.ceil((t1 - t0) / dt - 1e-9)))
    h = (t1 - t0) / n_steps
    x = grid.x
    static, driven = _split_field(field, x)
    static_phase = np.exp(-1j * h * static)
    kin = KINETIC * grid.k**2 * h
    half_kin = np.exp(-0.5j * kin)
    full_kin = half_kin * half_kin
    keep = {k if k >= 0 else n_steps + 1 + k for k in keep}

    out = {}
    if 0 in keep:
        out[0] = (t0, psi.copy())
    phi = fft.fft(psi, axis=-1, overwrite_x=True) * half_kin
    for step in range(1, n_steps + 1):
        tm = t0 + (step - 0.5) * h
        psi = fft.ifft(phi, axis=-1)
        psi *= static_phase
        if driven:
            lo, hi, v = _driven_window(driven, x, tm)
            if v is not None:
                psi[..., lo:hi] *= np.exp(-1j * h * v)
        phi = fft.fft(psi, axis=-1, overwrite_x=True)
        if step in keep:
            out[step] = (t0 + step * h, fft.ifft(phi * half_kin, axis=-1))
        if step < n_steps:
            phi *= full_kin
    return [out[k] for k in sorted(out)]


def _check_snapshot(psi, grid, t, edge_tol, check_edges):
    if not np.all(np.isfinite(psi)):
        raise NumericError(f"non-finite wavefunction at t={t:.6g}")
    if check_edges:
        edge = WaveFunction(grid, psi).edge_probability()
        if edge > edge_tol:
            raise DomainOverflowError(f"edge probability {edge:.2e} at t={t:.6g}")


def propagate(psi0: WaveFunction, field: PotentialField, t_span, dt, frames=2,
              edge_tol=1e-10, check_edges=True):
    """Strang split-operator propagation with a spectral kinetic term.

    Each step applies half a kinetic step in momentum space, the full
    potential at the step midpoint, then another half kinetic step. The
    step is shrunk so that an integer number of steps spans ``t_span``.
    ``frames`` evenly spaced snapshots (including both ends) are returned.
    """
    return propagate_many([psi0], field, t_span, dt, frames, edge_tol, check_edges)[0]


def propagate_many(states, field, t_span, dt, frames=2, edge_tol=1e-10, check_edges=True):
    """Propagate several independent wavefunctions in the same field."""
    grid = states[0].grid
    for s in states[1:]:
        _check_grid(grid, s.grid)
    t0, t1 = t_span
    n_steps = max(1, int(np.ceil((t1 - t0) / dt - 1e-9)))
    keep = np.unique(np.round(np.linspace(0, n_steps, max(2, frames))).astype(int))
    psi = np.array([s.psi for s in states], dtype=complex)
    snaps = _evolve(psi, grid, field, t0, t1, dt, keep.tolist())
    trajs = [Trajectory(np.array([t for t, _ in snaps]), []) for _ in states]
    for t, block in snaps:
        for j, traj in enumerate(trajs):
            _check_snapshot(block[j], grid, t, edge_tol, check_edges)
            traj.states.append(WaveFunction(grid, block[j]))
    return trajs


def energy(psi: WaveFunction, field, t=0.0):
    """<H> with the spectral kinetic operator."""
    grid = psi.grid
    phi_k = np.fft.fft(psi.psi)
    kin = np.sum(KINETIC * grid.k**2 * np.abs(phi_k) ** 2) / np.sum(np.abs(phi_k) ** 2)
    pot = np.sum(field(grid.x, t) * psi.density) / np.sum(psi.density)
    return float(kin + pot)


def excitation_probability(psi: WaveFunction, reference: EigenSet):
    """1 - |<ground|psi>|^2 against the reference set's ground state."""
    return 1.0 - overlap_fidelity(psi, reference.ground)


def overlap_fidelity(psi: WaveFunction, target: WaveFunction):
    _check_grid(psi.grid, target.grid)
    return abs(target.inner(psi)) ** 2 / (target.norm * psi.norm)
