"""Rebuild a 22-wave series, add noise, and decompose it again.

Run:  python3 demos/reference_round_trip.py [seed]
"""
import sys
import time

import numpy as np

from logiwave import decompose
from logiwave.synthetic import synthesize, reference_model

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
truth = reference_model()
x = synthesize(truth, noise_sigma=50.0, seed=seed)

start = time.perf_counter()
model, report = decompose(x)
print(f"{len(model.waves)} waves, R^2 = {report.r_squared:.5f}, RMSE = {report.rmse:.1f}, "
      f"d = {model.d:.1f}  ({time.perf_counter() - start:.1f}s)\n")

# %% Compare the large waves with what came back.
print(f"{'id':>3} {'a':>7} {'b':>7} {'amp':>8}   {'a fit':>7} {'b fit':>7}")
for w in truth.waves:
    if abs(w.amplitude) <= 300:
        continue
    same = [v for v in model.waves if np.sign(v.y_sat) == np.sign(w.y_sat)]
    v = min(same, key=lambda v: abs(v.b - w.b) + 10 * abs(np.log(v.a / w.a)))
    hit = abs(v.b - w.b) <= 3 and abs(v.a - w.a) / w.a <= 0.25
    print(f"{w.id:>3} {w.a:7.1f} {w.b:7.1f} {w.amplitude:8.0f}   {v.a:7.1f} {v.b:7.1f}"
          f"  {'ok' if hit else 'off'}")
print("\nSee demos/identifiability.py for why some of these cannot be pinned down.")
