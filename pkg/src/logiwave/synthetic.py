"""Reference S&P 500 wave table and a seeded generator for test series."""
from __future__ import annotations

import numpy as np

from .model import LogisticWave, MultilogisticModel, eval_multilogistic_derivative
from .timeseries import TimeSeries

#: Wave parameters (id, a-scale, b-time, y_sat) fitted to monthly S&P 500
#: data, July 1982 (t = 1) to April 2025 (t = 514).  A and B are the carriers.
REFERENCE_WAVES = (
    ("A", 40.7, 354, -201951),
    ("B", 139.5, 511, 2377300),
    ("1", 4.3, 60, 3419),
    ("2", 3.4, 88, 1650),
    ("3", 11.6, 209, 57083),
    ("4", 1.8, 259, 1651),
    ("5", 2.0, 270, 1368),
    ("6", 10.0, 303, 28921),
    ("7", 4.9, 390, 5600),
    ("8", 3.6, 427, 3460),
    ("9", 4.4, 471, 23238),
    ("10", 4.5, 509, 33808),
    ("11", 1.5, 101, -500),
    ("12", 3.0, 151, -1700),
    ("13", 4.4, 246, -5042),
    ("14", 1.9, 289, -1096),
    ("15", 5.4, 319, -15831),
    ("16", 1.2, 321, -608),
    ("17", 1.9, 338, -1600),
    ("18", 1.5, 352, -1300),
    ("19", 1.7, 365, -700),
    ("20", 4.6, 406, -4500),
)
REFERENCE_DRIFT = 13.9
REFERENCE_LENGTH = 514


def reference_model(d=REFERENCE_DRIFT, c=0.0):
    waves = tuple(LogisticWave(a=a, b=b, y_sat=y, id=i) for i, a, b, y in REFERENCE_WAVES)
    return MultilogisticModel(c=c, d=d, waves=waves)


def synthesize(model, n=REFERENCE_LENGTH, noise_sigma=0.0, seed=None):
    """Monthly series ``x_t = y'(t) + noise`` sampled at ``t = 1..n``.

    Noise is i.i.d. Gaussian with standard deviation ``noise_sigma`` drawn
    from ``numpy.random.default_rng(seed)``; the same seed gives the same
    series bit for bit.
    """
    if n < 1:
        raise ValueError("series length must be positive")
    if noise_sigma < 0:
        raise ValueError("noise sigma must be nonnegative")
    t = np.arange(1, n + 1, dtype=float)
    x = eval_multilogistic_derivative(model, t)
    if noise_sigma > 0:
        x = x + np.random.default_rng(seed).normal(0.0, noise_sigma, size=n)
    return TimeSeries(x, t)
