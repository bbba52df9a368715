"""Switching a tweezer on: excitation versus ramp time, numerics against the two-level model.

The tweezer depth follows a constant-adiabaticity profile from zero to
500 E_r. The excitation oscillates with ramp time; at its minima a fast ramp
is as good as a slow one.

Run: python demos/02_rampup_scan.py [out.csv]
"""

import sys

import numpy as np

from tweezer_qc import io
from tweezer_qc.scenarios import RampupSetup, rampup_scan

setup = RampupSetup(v_target=500.0)
durations = np.arange(4.0, 30.01, 1.0)
points = rampup_scan(durations, setup)

print(" T_r [us]   numeric    envelope   two-level")
for p in points:
    print(f"{p.duration_us:8.1f}   {p.numeric:.2e}   {p.envelope:.2e}   {p.harmonic:.2e}")

best = min(points, key=lambda p: p.numeric)
print(f"\nbest ramp in this scan: {best.duration_us} us with P_e = {best.numeric:.1e}")

if len(sys.argv) > 1:
    io.write_csv(sys.argv[1], ["T_r_us", "P_e_numeric", "P_e_envelope", "P_e_harmonic"],
                 [(p.duration_us, p.numeric, p.envelope, p.harmonic) for p in points])
