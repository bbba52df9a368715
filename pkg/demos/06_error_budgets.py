"""Error budget: photon scattering, magnetic and intensity dephasing, gate times.

Run: python demos/06_error_budgets.py
"""

import numpy as np

from tweezer_qc import budgets, gates

scenarios = [
    budgets.tweezer_scattering(budgets.FAR_DETUNED_WAVELENGTH, exposure=300e-6,
                               label="tweezer 10 nm red of 6P1/2, one gate"),
    budgets.tweezer_scattering(420.86e-9, polarization="sigma-", state="up", exposure=25e-6,
                               label="spin-dependent tweezer, one transport"),
    budgets.lattice_scattering(50.0, exposure=300e-6),
]
for s in scenarios:
    rate = budgets.scattering_rate(s)
    p = budgets.scattering_probability(rate, s.exposure)
    print(f"{s.label:40s} {rate:7.3f} Hz   P = {p:.1e}")

print()
for noise in (50e-6, 5e-6):
    d = budgets.dephasing_budget(budgets.DephasingScenario(noise, hold=100e-6))
    print(f"field noise {noise * 1e6:4.0f} uG: T_c = {d.coherence_time * 1e3:6.1f} ms, "
          f"error over 100 us = {d.error:.1e}")
print(budgets.dephasing_budget(budgets.DephasingScenario(50e-6), pair="clock").note)
phi = budgets.intensity_dephasing(500.0, 1e-5, 100e-6)
print(f"relative intensity noise 1e-5 at 500 E_r: {phi / (2 * np.pi):.2e} x 2 pi rad")

print()
for gate in gates.GATES:
    print(gates.gate_budget(gate, 1).table(), "\n")
