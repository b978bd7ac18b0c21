"""Logistic wavelet basics: norm, admissibility, and reading one wave off a scalogram.

Run:  python3 demos/wavelet_basics.py
"""
import numpy as np

from logiwave import (admissibility_check, find_extrema, first_difference, l2_norm_squared,
                      psi2, scalogram, ysat_from_cwt)
from logiwave.model import LogisticWave, MultilogisticModel
from logiwave.synthetic import synthesize

# %% The mother wavelet is sqrt(30) times the second derivative of the logistic.
print(f"||psi2||^2          = {l2_norm_squared(psi2):.12f}")
print(f"peak of psi2        = {psi2(np.linspace(-5, 5, 100001)).max():.6f}")
print(f"admissibility const = {admissibility_check():.5f}")

# %% One wave in monthly data is a sech^2 pulse.  Difference it, scan it.
wave = LogisticWave(a=5.0, b=100.0, y_sat=1000.0)
x = synthesize(MultilogisticModel(d=2.0, waves=[wave]), n=200)
sc = scalogram(first_difference(x))
top = find_extrema(sc)[0]
print(f"\nscalogram {sc.shape}, strongest extremum: {top.kind} at "
      f"alpha={top.alpha}, beta={top.beta}")
print(f"y_sat read back: {ysat_from_cwt(top):.1f}  (true {wave.y_sat})")

# %% The drift d never shows up: its first difference is a constant, and psi2 has zero mean.
x0 = synthesize(MultilogisticModel(d=0.0, waves=[wave]), n=200)
sc0 = scalogram(first_difference(x0))
inner = (sc.betas > 60) & (sc.betas < 140)
print(f"max change from drift over interior cells: "
      f"{np.max(np.abs(sc.values[:, inner] - sc0.values[:, inner])):.2e}")
