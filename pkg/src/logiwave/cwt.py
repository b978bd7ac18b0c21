"""Riemann-sum continuous wavelet transform with logistic wavelets.

The transform is applied to the first difference of the series under study,
which plays the role of ``f''``.  For
``f(t) = c + d t + y_sat / (1 + exp(-(t - b) / a))`` the energy-normalized
response ``alpha**-0.5 * <f'', psi2((t - beta) / alpha)>`` is extremal at
``(alpha, beta) = (a, b)``, where the raw inner product equals
``y_sat / (sqrt(30) a)``.
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .timeseries import TimeSeries
from .wavelet import SQRT30, WaveletParams, psi2

#: Half-width of the effective wavelet support, in units of the scale.
EDGE_WIDTH = 5.0

DETAIL_ALPHAS = np.arange(1.0, 30.0 + 0.25, 0.5)
CARRIER_ALPHAS = np.arange(1.0, 120.0 + 0.5, 1.0)


@dataclass(frozen=True)
class Scalogram:
    """CWT values on an ``(alpha, beta)`` grid; rows follow ``alphas``."""

    alphas: np.ndarray
    betas: np.ndarray
    values: np.ndarray
    t_range: tuple = (None, None)

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float)
        betas = np.asarray(self.betas, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if alphas.size == 0 or betas.size == 0:
            raise ValueError("scalogram grids must be nonempty")
        if np.any(alphas <= 0) or np.any(np.diff(alphas) <= 0):
            raise ValueError("alphas must be positive and strictly increasing")
        if np.any(np.diff(betas) <= 0):
            raise ValueError("betas must be strictly increasing")
        if values.shape != (alphas.size, betas.size):
            raise ValueError(
                f"values shape {values.shape} does not match grids "
                f"({alphas.size}, {betas.size})")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    def to_csv(self, path):
        """First row is the beta grid, first column the alpha grid."""
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["alpha\\beta"] + [format(b, ".17g") for b in self.betas])
            for a, row in zip(self.alphas, self.values):
                writer.writerow([format(a, ".17g")] + [format(v, ".17g") for v in row])
        return path

    @classmethod
    def from_csv(cls, path):
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        betas = np.array([float(b) for b in rows[0][1:]])
        alphas = np.array([float(r[0]) for r in rows[1:]])
        values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        return cls(alphas, betas, values)


@dataclass(frozen=True)
class ScalogramExtremum:
    """One detected extremum.

    ``cwt_value`` is the raw transform at the cell; ``score`` is the value
    that was compared against the neighbours (``cwt_value / sqrt(alpha)``
    under the default energy normalization).
    """

    alpha: float
    beta: float
    cwt_value: float
    kind: str
    edge: bool = False
    score: float = None

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta,
                "cwt_value": self.cwt_value, "kind": self.kind,
                "edge": self.edge, "score": self.score}


def is_edge(alpha, beta, t_first, t_last, width=EDGE_WIDTH):
    """True when ``[beta - width*alpha, beta + width*alpha]`` leaves the data."""
    return bool(beta - width * alpha < t_first or beta + width * alpha > t_last)


def _as_arrays(signal):
    if isinstance(signal, TimeSeries):
        return signal.t, signal.values
    values = np.asarray(signal, dtype=float)
    return np.arange(1, values.size + 1, dtype=float), values


def cwt_point(signal, p):
    """Riemann sum ``sum_n signal[n] * psi2((t_n - beta) / alpha)`` with unit spacing.

    ``signal`` should be the first difference of the series being analysed.
    Only observed samples enter the sum; nothing is padded.
    """
    if not isinstance(p, WaveletParams):
        p = WaveletParams(*p)
    t, v = _as_arrays(signal)
    if v.size == 0:
        raise ValueError("empty signal")
    return float(psi2((t - p.beta) / p.alpha) @ v)


def _row(t, v, alpha, betas):
    return psi2((t[None, :] - betas[:, None]) / alpha) @ v


def scalogram(signal, alphas=DETAIL_ALPHAS, betas=None, workers=None):
    """CWT of ``signal`` on the ``alphas`` x ``betas`` grid.

    Parameters
    ----------
    signal : TimeSeries or array_like
        First-differenced series.  Plain arrays are indexed ``1..N``.
    alphas, betas : array_like
        Scale and shift grids.  ``betas`` defaults to the integers from
        ``floor(t[0])`` to ``floor(t[-1])``: one column per sample, and
        whole-month centers even when ``t`` holds interval midpoints.
    workers : int, optional
        Evaluate rows on a thread pool.  Output ordering does not depend on
        the worker count.
    """
    t, v = _as_arrays(signal)
    if v.size == 0:
        raise ValueError("empty signal")
    alphas = np.asarray(alphas, dtype=float)
    if betas is None:
        betas = np.arange(np.floor(t[0]), np.floor(t[-1]) + 1.0)
    betas = np.asarray(betas, dtype=float)
    if alphas.size == 0 or betas.size == 0:
        raise ValueError("scalogram grids must be nonempty")

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: _row(t, v, a, betas), alphas))
    else:
        rows = [_row(t, v, a, betas) for a in alphas]
    return Scalogram(alphas, betas, np.vstack(rows), (float(t[0]), float(t[-1])))


def _neighbour_stack(values, fill):
    padded = np.pad(values, 1, mode="constant", constant_values=fill)
    n, m = values.shape
    return np.stack([padded[1 + di:1 + di + n, 1 + dj:1 + dj + m]
                     for di in (-1, 0, 1) for dj in (-1, 0, 1)
                     if di or dj])


def normalized_values(s, normalization="l2"):
    """Scalogram rows rescaled for extremum search.

    ``"l2"`` divides row ``alpha`` by ``sqrt(alpha)``, the norm of the
    unnormalized child wavelet.  On that field the response to a single
    logistic wave peaks at its own ``(a, b)`` (Cauchy-Schwarz); on the raw
    field the peak drifts to about ``1.55 a``.  ``"none"`` returns the raw
    values.
    """
    if normalization == "l2":
        return s.values / np.sqrt(s.alphas)[:, None]
    if normalization == "none":
        return s.values
    raise ValueError(f"unknown normalization {normalization!r}")


def find_extrema(s, min_abs=0.0, exclusion_radius=(2.0, 6.0), edge_width=EDGE_WIDTH,
                 normalization="l2"):
    """Strict local extrema of a scalogram, pruned and sorted by magnitude.

    Extrema are searched on ``normalized_values(s, normalization)``.  A cell
    is a maximum when it exceeds each of its (up to eight) neighbours by
    more than a rounding margin (64 ulp of the largest value), and a
    minimum when it falls below them by that margin; cells on the grid border compare
    only against neighbours that exist.  Candidates whose raw
    ``|cwt_value| < min_abs`` are dropped.  Going down the list by
    decreasing ``|score|``, a candidate is discarded when it lies within
    ``exclusion_radius = (d_alpha, d_beta)`` of one already kept.

    Returns
    -------
    list of ScalogramExtremum
    """
    if min_abs < 0:
        raise ValueError("min_abs must be nonnegative")
    raw = s.values
    vals = normalized_values(s, normalization)
    # a cell must beat its neighbours by more than rounding noise
    tol = 64 * np.finfo(float).eps * float(np.max(np.abs(vals), initial=0.0))
    is_max = np.all(vals > _neighbour_stack(vals, -np.inf) + tol, axis=0)
    is_min = np.all(vals < _neighbour_stack(vals, np.inf) - tol, axis=0)
    cand = (is_max | is_min) & (np.abs(raw) >= min_abs) & (raw != 0)
    ii, jj = np.nonzero(cand)
    # stable ordering: magnitude first, then grid position
    order = np.lexsort((jj, ii, -np.abs(vals[ii, jj])))
    d_alpha, d_beta = exclusion_radius
    t_first, t_last = s.t_range
    if t_first is None:
        t_first, t_last = s.betas[0], s.betas[-1]

    kept = []
    for k in order:
        a, b = s.alphas[ii[k]], s.betas[jj[k]]
        if any(abs(a - e.alpha) <= d_alpha and abs(b - e.beta) <= d_beta for e in kept):
            continue
        kept.append(ScalogramExtremum(
            alpha=float(a), beta=float(b), cwt_value=float(raw[ii[k], jj[k]]),
            kind="maximum" if is_max[ii[k], jj[k]] else "minimum",
            edge=is_edge(a, b, t_first, t_last, edge_width),
            score=float(vals[ii[k], jj[k]])))
    return kept


def ysat_from_cwt(e):
    """Saturation level implied by an extremum, ``sqrt(30) * alpha * cwt``."""
    return SQRT30 * e.alpha * e.cwt_value
