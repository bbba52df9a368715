"""Trap frequencies, oscillator lengths and the scales that set every later time.

Run: python demos/01_trap_constants.py
"""

import numpy as np

from tweezer_qc import gates
from tweezer_qc.dynamics import Grid, bloch_bands, stationary_states, wannier_state
from tweezer_qc.potentials import LatticeSpec, PotentialField, TweezerSpec, trap_frequency
from tweezer_qc.units import UNITS

print(f"recoil energy E_r/h = {UNITS.recoil_frequency:.1f} Hz, "
      f"time unit hbar/E_r = {UNITS.time * 1e6:.3f} us\n")

lattice = LatticeSpec(50.0)
bare = PotentialField((lattice,))
combined = bare + TweezerSpec(500.0, waist=0.5)

# harmonic approximation at the bottom of each well
for label, field in [("50 E_r lattice site", bare),
                     ("500 E_r tweezer alone", PotentialField((TweezerSpec(500.0),))),
                     ("tweezer on a lattice site", combined)]:
    omega, sigma = trap_frequency(field)
    f_khz = UNITS.angular_si(omega) / (2 * np.pi) / 1e3
    print(f"{label:28s} {f_khz:6.2f} kHz   sigma = {UNITS.length_si(sigma) * 1e9:5.1f} nm")

# Tunneling comes from the width of the lowest Bloch band. It is tiny at
# 50 E_r, so atoms stay put unless a tweezer moves them.
j = bloch_bands(lattice).tunneling
print(f"\ntunneling J/h = {UNITS.energy_hz(j):.3f} Hz")

# On-site interaction of two atoms sharing one site, with the transverse
# directions in their harmonic ground states.
grid = Grid.for_span(0.0, 0.0)
w = wannier_state(bare, grid)
u_site = gates.interaction_energy(w, w, transverse=gates.transverse_pair())
ground = stationary_states(combined, grid, 1).ground
u_tw = gates.interaction_energy(ground, ground, transverse=gates.transverse_pair(500.0))
print(f"on-site interaction U/h: lattice {UNITS.energy_hz(u_site):.0f} Hz, "
      f"under the tweezer {UNITS.energy_hz(u_tw):.0f} Hz")

swap = gates.swap_times(u_tw)
print(f"with U_eg = 0.35 U_gg the sqrt(swap) takes {UNITS.us(swap.t_entangle):.1f} us")
