"""Collisional two-qubit gates: interaction energies, phases, spin exchange, time budgets.

Interactions are treated perturbatively: the two atoms follow their
single-particle trajectories and the contact interaction only adds a phase.
Energies and times are in internal units (E_r and hbar/E_r) unless a name
says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import ShapeError, WaveFunction, _check_grid
from .potentials import LatticeSpec, PotentialField, TweezerSpec, trap_frequency
from .units import MASS, QUBIT_PAIRS, RB87, UNITS

U_EG_RATIO = 0.35


class NoGateError(ValueError):
    """Equal interaction energies: no differential phase accumulates."""


def default_scattering_length(species=RB87):
    """Background scattering length in lattice units."""
    return UNITS.to_length(species.scattering_length)


def transverse_factor(transverse):
    """Product of ``sqrt(m omega / (2 pi hbar))`` over the two transverse axes."""
    wy, wz = np.broadcast_to(np.asarray(transverse, dtype=float), (2,))
    if wy <= 0 or wz <= 0:
        raise ValueError("transverse frequencies must be positive")
    return np.sqrt(MASS * wy / (2 * np.pi)) * np.sqrt(MASS * wz / (2 * np.pi))


def transverse_pair(tweezer_depth=0.0, lattice=LatticeSpec(), waist=0.5, center=0.0):
    """Transverse trap frequencies of a site, optionally with a tweezer on it.

    The tweezer beam is perpendicular to the lattice plane: one transverse
    axis feels tweezer and lattice like the transport axis does, the beam
    axis feels the lattice only.
    """
    bare = PotentialField((lattice,))
    w_beam, _ = trap_frequency(bare, center)
    if tweezer_depth <= 0:
        return w_beam, w_beam
    w_radial, _ = trap_frequency(bare + TweezerSpec(tweezer_depth, waist, center), center)
    return w_radial, w_beam


def interaction_energy(psi_a: WaveFunction, psi_b: WaveFunction, a_s=None, transverse=None):
    """Contact interaction ``g3D * transverse factors * int |psi_a|^2 |psi_b|^2 dx``.

    ``transverse`` is one angular frequency for both transverse axes or a pair
    ``(omega_y, omega_z)``. The transverse motion is assumed to be in the
    harmonic ground state of each axis.
    """
    _check_grid(psi_a.grid, psi_b.grid)
    if a_s is None:
        a_s = default_scattering_length()
    if transverse is None:
        raise ValueError("transverse trap frequency required")
    g3d = 4 * np.pi * a_s / MASS
    overlap = np.sum(psi_a.density * psi_b.density) * psi_a.grid.dx
    overlap /= psi_a.norm * psi_b.norm
    return float(g3d * transverse_factor(transverse) * overlap)


def merge_gate_phase_time(u_same, u_cross):
    """Time for a differential collisional phase of pi between spin combinations."""
    du = abs(u_cross - u_same)
    if du <= 1e-12 * max(abs(u_same), abs(u_cross)):
        raise NoGateError("identical interaction energies")
    return np.pi / du


def phase_gate_time(u, target_phase=np.pi):
    if not u > 0:
        raise ValueError("interaction energy must be positive")
    return target_phase / u


@dataclass(frozen=True)
class SwapTimes:
    u_eg: float
    t_swap: float

    @property
    def t_entangle(self):
        """sqrt(swap) time, half the full exchange period."""
        return self.t_swap / 2


def swap_times(u_gg) -> SwapTimes:
    if not u_gg > 0:
        raise ValueError("U_gg must be positive")
    u_eg = U_EG_RATIO * u_gg
    return SwapTimes(u_eg, np.pi / u_eg)


# ---------------------------------------------------------------- spin algebra


@dataclass(frozen=True)
class QubitState:
    alpha: complex
    beta: complex
    pair: str = "clock"

    def __post_init__(self):
        if self.pair not in QUBIT_PAIRS:
            raise KeyError(self.pair)
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1) > 1e-12:
            raise ValueError("qubit amplitudes are not normalized")

    @property
    def vector(self):
        return np.array([self.alpha, self.beta], dtype=complex)


# rows: s, t0, t-1, t+1 ; columns: product basis uu, ud, du, dd
_R2 = 1 / np.sqrt(2)
SINGLET_TRIPLET = np.array([
    [0, _R2, -_R2, 0],
    [0, _R2, _R2, 0],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
], dtype=complex)
SINGLET_TRIPLET_LABELS = ("s", "t0", "t-1", "t+1")
PRODUCT_LABELS = ("uu", "ud", "du", "dd")


@dataclass(frozen=True)
class TwoQubitState:
    """Spin state of an atom in the ground (first label) and one in the excited level.

    Amplitudes are ordered ``(up_g up_e, up_g down_e, down_g up_e, down_g down_e)``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (4,):
            raise ShapeError("two-qubit state needs four amplitudes")
        if abs(np.vdot(amp, amp).real - 1) > 1e-12:
            raise ValueError("two-qubit state is not normalized")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def product(cls, ground: QubitState, excited: QubitState):
        return cls(np.kron(ground.vector, excited.vector))

    @classmethod
    def basis(cls, label):
        amp = np.zeros(4, dtype=complex)
        amp[PRODUCT_LABELS.index(label)] = 1
        return cls(amp)

    @classmethod
    def from_singlet_triplet(cls, coeffs):
        return cls(SINGLET_TRIPLET.conj().T @ np.asarray(coeffs, dtype=complex))

    def singlet_triplet(self):
        """Amplitudes on ``(s, t0, t-1, t+1)``."""
        return SINGLET_TRIPLET @ self.amplitudes

    def populations(self):
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def spin_exchange_evolve(psi: TwoQubitState, u_eg, t) -> TwoQubitState:
    """Interaction phase on the triplet states, whose orbital part is symmetric.

    The singlet has an antisymmetric orbital wavefunction and does not
    interact. All three triplets pick up ``exp(i U_eg t)``; only the
    singlet-triplet phase difference matters for the swap.
    """
    st = psi.singlet_triplet()
    phase = np.exp(1j * u_eg * t)
    st = st * np.array([1.0, phase, phase, phase])
    return TwoQubitState.from_singlet_triplet(st)


def bandmap_interaction_phase(trajectory_a, trajectory_b, a_s=None, transverse=None):
    """Accumulated interaction phase ``int U(t) dt`` along two sampled trajectories."""
    ta, tb = np.asarray(trajectory_a.times), np.asarray(trajectory_b.times)
    if ta.shape != tb.shape or not np.allclose(ta, tb, rtol=0, atol=1e-12):
        raise ShapeError("trajectories are sampled at different times")
    if len(ta) < 2:
        raise ShapeError("need at least two samples to integrate")
    u = np.array([interaction_energy(a, b, a_s, transverse)
                  for a, b in zip(trajectory_a.states, trajectory_b.states)])
    return float(np.trapezoid(u, ta))


# ---------------------------------------------------------------- budgets


@dataclass(frozen=True)
class BudgetStep:
    name: str
    count: int
    duration_us: float

    @property
    def total_us(self):
        return self.count * self.duration_us


@dataclass(frozen=True)
class GateBudget:
    gate: str
    n: int
    steps: tuple = ()

    @property
    def total_us(self):
        return sum(s.total_us for s in self.steps)

    def table(self):
        """Aligned text table with one row per step and the overall time."""
        rows = [("step", "amount", "time")]
        rows += [(s.name, str(s.count), f"{s.duration_us:g} us") for s in self.steps]
        rows.append(("overall", "-", f"{self.total_us:g} us"))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines)


GATES = ("transport-phase", "exchange")


@dataclass(frozen=True)
class StepDurations:
    ramp_us: float = 11.0
    transport_us: float = 25.0
    phase_us: float = 83.0
    swap_half_us: float = 125.0
    merge_us: float = 75.0


def gate_budget(gate, n, durations: StepDurations = StepDurations()) -> GateBudget:
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    n = int(n)
    d = durations
    if gate == "transport-phase":
        steps = (BudgetStep("ramp-up/down", 6, d.ramp_us),
                 BudgetStep("transport", 2 * (n + 1), d.transport_us),
                 BudgetStep("phase gate", 1, d.phase_us))
    elif gate == "exchange":
        steps = (BudgetStep("ramp-up/down", 2, d.ramp_us),
                 BudgetStep("transport", 2 * n, d.transport_us),
                 BudgetStep("phase gate", 1, d.swap_half_us),
                 BudgetStep("merge/split", 2, d.merge_us))
    else:
        raise KeyError(f"unknown gate {gate!r}")
    return GateBudget(gate, n, steps)


def closed_form_total_us(gate, n):
    """Gate time from the closed-form expressions with the default step durations."""
    if gate == "transport-phase":
        return 199 + 50 * n
    if gate == "exchange":
        return 297 + 50 * n
    raise KeyError(f"unknown gate {gate!r}")


@dataclass(frozen=True)
class SequenceStep:
    name: str
    duration_us: float
    moves: str = ""
    potentials: str = ""
    marker: str = ""
    count: int = 1

    @property
    def total_us(self):
        return self.count * self.duration_us


def spin_dependent_gate_sequence(n, durations: StepDurations = StepDurations()):
    """Steps of the spin-dependent transport phase gate over ``n`` sites.

    The forward half brings the atoms together and ramps up the second spin
    component; the hold is split by a pi-pulse echo and the forward half is
    then replayed in reverse. A final pi-pulse restores the populations.
    """
    d = durations
    forward = [
        SequenceStep("ramp up transport tweezer", d.ramp_us, "", "linear tweezer on atom B"),
        SequenceStep("transport to neighbor", d.transport_us, "up and down of B",
                     "linear tweezer", count=n),
        SequenceStep("switch to sigma-, ramp up second tweezer", d.ramp_us, "",
                     "sigma- tweezers on A and B, down sees none"),
        SequenceStep("move up components one site", d.transport_us, "up of A and B",
                     "sigma- tweezers"),
        SequenceStep("switch to linear", d.ramp_us, "",
                     "linear tweezer: down of A joins up of B"),
    ]
    forward = [s for s in forward if s.count > 0]
    hold = d.phase_us / 2
    middle = [
        SequenceStep("hold", hold, "", "collision up-down", count=1),
        SequenceStep("pi-pulse", 0.0, "", "", marker="echo"),
        SequenceStep("hold", hold, "", "collision up-down", count=1),
    ]
    backward = [SequenceStep(s.name + " (reversed)", s.duration_us, s.moves, s.potentials,
                             s.marker, s.count) for s in reversed(forward)]
    final = [SequenceStep("pi-pulse", 0.0, "", "", marker="restore")]
    return forward + middle + backward + final


def sequence_total_us(steps):
    return sum(s.total_us for s in steps)
