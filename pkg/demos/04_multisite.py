"""Repeating the optimized single-site move up to 100 times.

Each repetition adds a small coherent excitation. Whether these add up or
cancel depends on the phase the excitation picks up per step, so the error
oscillates with the number of sites instead of growing steadily.

Run: python demos/04_multisite.py   (a few minutes; reuses transport_coeffs.npy if present)
"""

from pathlib import Path

import numpy as np

from tweezer_qc.scenarios import multisite_transport
from tweezer_qc.search import optimize_transport

saved = Path("transport_coeffs.npy")
coeffs = np.load(saved) if saved.exists() else optimize_transport(25.0, 5).x

res = multisite_transport(coeffs, 25.0, n_max=100)
print(f"single-site error        {res.single_site:.2e}")
print(f"worst over 100 sites     {res.excitation.max():.2e}  "
      f"({res.max_ratio:.1f}x the single-site error)")
print(f"dominant period          {res.dominant_period():.1f} sites")
for n in (1, 2, 5, 10, 25, 50, 100):
    print(f"  n = {n:3d}   P_e = {res.excitation[n - 1]:.2e}")
