"""Detect-subtract-refine decomposition into logistic solitary waves.

Pipeline on a monthly series ``x``:

1. difference ``x`` and scan a wide scale grid (carrier pass) for waves
   broader than the detail grid can resolve; fit them and the drift with
   a robust loss;
2. repeatedly scan the first difference of the current residual on the
   detail grid and add the strongest new extremum above the noise floor,
   refining the detail waves inside boxes around their detection values;
3. stop at the target R^2, the wave budget, or when no extremum is left;
4. refine everything jointly once.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit

from .cwt import (CARRIER_ALPHAS, DETAIL_ALPHAS, EDGE_WIDTH, find_extrema, is_edge,
                  scalogram, ysat_from_cwt)
from .model import (LogisticWave, MultilogisticModel, eval_multilogistic,
                    eval_multilogistic_derivative, sech2)
from .timeseries import FitReport, SeriesError, TimeSeries, first_difference, fit_metrics

log = logging.getLogger(__name__)


class ConvergenceWarning(UserWarning):
    """Refinement stopped at its iteration cap; the best point found is returned."""


@dataclass(frozen=True)
class DecompositionConfig:
    """Knobs of `decompose`.

    ``min_abs_cwt=None`` means three times the median absolute value of
    each scale row of the scalogram being searched (see `noise_floor`).
    """

    max_waves: int = 22
    min_abs_cwt: float = None
    alpha_grid: tuple = tuple(DETAIL_ALPHAS)
    carrier_alpha_grid: tuple = tuple(CARRIER_ALPHAS)
    beta_grid: tuple = None
    max_carriers: int = 2
    refine: bool = True
    stop_r2: float = 0.9939
    exclusion_radius: tuple = (2.0, 6.0)
    max_refine_evals: int = 2000
    workers: int = None

    def __post_init__(self):
        if self.max_waves < 1:
            raise ValueError("max_waves must be at least 1")
        if not 0.0 < self.stop_r2 <= 1.0:
            raise ValueError("stop_r2 must lie in (0, 1]")
        if self.min_abs_cwt is not None and self.min_abs_cwt < 0:
            raise ValueError("min_abs_cwt must be nonnegative")


def subtract_wave(series, w, space="derivative"):
    """Remove one wave from ``series``.

    ``space="derivative"`` subtracts ``y_sat/(4a) sech^2((t-b)/(2a))`` (for
    monthly data); ``space="cumulative"`` subtracts the logistic step
    ``y_sat / (1 + exp(-(t-b)/a))`` (for running totals).
    """
    t = series.t
    if space == "derivative":
        term = w.amplitude * sech2((t - w.b) / (2.0 * w.a))
    elif space == "cumulative":
        term = w.y_sat * expit((t - w.b) / w.a)
    else:
        raise ValueError(f"unknown space {space!r}")
    return TimeSeries(series.values - term, t, series.labels)


def _wave_order_key(w):
    return (-abs(w.amplitude), w.b, w.a)


def noise_floor(sc, factor=3.0):
    """Per-scale detection threshold: ``factor`` times the median ``|cwt|`` of each row.

    Raw coefficients grow roughly like ``alpha`` for broad features and like
    ``sqrt(alpha)`` for noise, so a single global median is dominated by
    the widest scales; a row-wise floor keeps narrow waves detectable.
    """
    return factor * np.median(np.abs(sc.values), axis=1)


def significant_extrema(sc, min_abs=None, exclusion_radius=(2.0, 6.0)):
    """Extrema clearing ``min_abs``: a scalar, one value per scale row, or
    `noise_floor` when None."""
    if min_abs is None:
        min_abs = noise_floor(sc)
    level = np.broadcast_to(np.asarray(min_abs, dtype=float), sc.alphas.shape)
    row = {float(a): float(v) for a, v in zip(sc.alphas, level)}
    found = find_extrema(sc, float(level.min()), exclusion_radius)
    return [e for e in found if abs(e.cwt_value) >= row[e.alpha]]


def _wave_from(e):
    return LogisticWave(a=e.alpha, b=e.beta, y_sat=ysat_from_cwt(e), edge=e.edge)


def detect_waves(signal_diff, cfg=DecompositionConfig(), alphas=None, min_abs=None):
    """Waves read off the extrema of one scalogram of ``signal_diff``.

    Each accepted extremum ``(alpha, beta)`` becomes a wave with
    ``a = alpha``, ``b = beta`` and ``y_sat = sqrt(30) alpha cwt``; waves
    are ordered by decreasing ``|y_sat| / (4a)``.  ``min_abs`` defaults to
    ``cfg.min_abs_cwt`` and then to `noise_floor`.
    """
    alphas = cfg.alpha_grid if alphas is None else alphas
    sc = scalogram(signal_diff, alphas, cfg.beta_grid, workers=cfg.workers)
    if min_abs is None:
        min_abs = cfg.min_abs_cwt
    if min_abs is None:
        min_abs = noise_floor(sc)
    waves = [_wave_from(e) for e in significant_extrema(sc, min_abs, cfg.exclusion_radius)]
    return sorted(waves, key=_wave_order_key)


# --- refinement -------------------------------------------------------------

def _pack(m, which):
    p = [m.d]
    for i in which:
        w = m.waves[i]
        p += [w.a, w.b, w.y_sat]
    return np.array(p, dtype=float)


def _unpack(m, which, p):
    waves = list(m.waves)
    for k, i in enumerate(which):
        a, b, y = p[1 + 3 * k:4 + 3 * k]
        waves[i] = replace(waves[i], a=float(a), b=float(b), y_sat=float(y))
    return m.with_waves(waves, d=float(p[0]))


def _bounds(anchors, which, t_first, t_last):
    """Box around fixed anchor waves: ``a`` in ``[a/2, 2a]`` (never below 0.5
    unless the anchor is), ``b`` within ``3a`` of the anchor and inside the
    observed span, ``y_sat`` keeps its sign."""
    lo, hi = [-np.inf], [np.inf]
    for i in which:
        w = anchors[i]
        b = min(max(w.b, t_first), t_last)
        lo += [max(0.5 * w.a, min(0.5, w.a)), max(b - 3.0 * w.a, t_first)]
        hi += [2.0 * w.a, min(b + 3.0 * w.a, t_last)]
        if w.y_sat > 0:
            lo.append(0.0)
            hi.append(np.inf)
        else:
            lo.append(-np.inf)
            hi.append(0.0)
    return np.array(lo), np.array(hi)


_LOSSES = {
    "linear": lambda z: z,
    "soft_l1": lambda z: 2.0 * (np.sqrt(1.0 + z) - 1.0),
    "cauchy": np.log1p,
}


def _robust_cost(r, loss, f_scale):
    z = (r / f_scale) ** 2
    return 0.5 * f_scale ** 2 * float(np.sum(_LOSSES[loss](z)))


def _residual_fn(t, x, m, which):
    fixed = [w for i, w in enumerate(m.waves) if i not in set(which)]
    base = x - eval_multilogistic_derivative(m.with_waves(fixed, d=0.0), t)

    def fun(p):
        out = base - p[0]
        for k in range(len(which)):
            a, b, y = p[1 + 3 * k:4 + 3 * k]
            out = out - y / (4.0 * a) * sech2((t - b) / (2.0 * a))
        return out

    def jac(p):
        J = np.empty((t.size, p.size))
        J[:, 0] = -1.0
        for k in range(len(which)):
            a, b, y = p[1 + 3 * k:4 + 3 * k]
            u = (t - b) / (2.0 * a)
            s = sech2(u)
            th = np.tanh(u)
            J[:, 1 + 3 * k] = -(y * s / (4.0 * a * a)) * (2.0 * th * u - 1.0)
            J[:, 2 + 3 * k] = -y * s * th / (4.0 * a * a)
            J[:, 3 + 3 * k] = -s / (4.0 * a)
        return J

    return fun, jac


def sse(series, m):
    r = series.values - eval_multilogistic_derivative(m, series.t)
    return float(r @ r)


def refine_parameters(series_diff, m, which=None, method="trf", max_evals=2000,
                      anchors=None, loss="linear", f_scale=1.0):
    """Bounded local least-squares polish of selected waves and the drift.

    Parameters
    ----------
    series_diff : TimeSeries
        Monthly (differential) observations the derivative model is fitted to.
    m : MultilogisticModel
        Starting point.
    which : iterable of int, optional
        Indices of the waves to move; all by default.  ``d`` always moves.
    method : {"trf", "coordinate"}
        Trust-region reflective least squares (scipy) or the built-in
        shrinking-step coordinate search.
    max_evals : int
        Evaluation cap.  Hitting it emits `ConvergenceWarning` and returns
        the best point seen.
    anchors : sequence of LogisticWave, optional
        Waves the bounds are built around (see `_bounds`); defaults to
        ``m.waves``.  Passing the detection-time waves keeps repeated
        refinements from walking away step by step.
    loss, f_scale :
        Robust loss (``"linear"``, ``"soft_l1"`` or ``"cauchy"``) and its
        residual scale, as in `scipy.optimize.least_squares`.

    Returns
    -------
    MultilogisticModel
        Never has a larger objective (sum of squares under the linear loss)
        than ``m``.
    """
    which = list(range(len(m.waves))) if which is None else sorted(set(which))
    if loss not in _LOSSES:
        raise ValueError(f"unknown loss {loss!r}")
    anchors = m.waves if anchors is None else tuple(anchors)
    t, x = series_diff.t, series_diff.values
    fun, jac = _residual_fn(t, x, m, which)
    lo, hi = _bounds(anchors, which, float(t[0]), float(t[-1]))
    p_start = _pack(m, which)
    cost0 = _robust_cost(fun(p_start), loss, f_scale)
    p0 = np.clip(p_start, lo, hi)

    if method == "trf":
        res = least_squares(fun, p0, jac=jac, bounds=(lo, hi), method="trf",
                            x_scale="jac", loss=loss, f_scale=f_scale,
                            max_nfev=max_evals)
        p, converged = res.x, res.status > 0
    elif method == "coordinate":
        p, converged = coordinate_search(
            lambda q: _robust_cost(fun(q), loss, f_scale), p0, lo, hi,
            step0=_initial_steps(p0, which, m), max_evals=max_evals)
    else:
        raise ValueError(f"unknown method {method!r}")

    if not converged:
        warnings.warn("refinement hit its evaluation cap", ConvergenceWarning,
                      stacklevel=2)
    if _robust_cost(fun(p), loss, f_scale) > cost0:
        return m
    return _unpack(m, which, p)


def _initial_steps(p0, which, m):
    steps = [max(1.0, 0.05 * abs(p0[0]))]
    for i in which:
        w = m.waves[i]
        steps += [0.1 * w.a, 0.5 * w.a, 0.1 * abs(w.y_sat)]
    return np.array(steps)


def coordinate_search(f, x0, lo, hi, step0, min_rel_step=1e-9, max_evals=20000,
                      grow=2.0, shrink=0.5):
    """Box-constrained coordinate pattern search.

    Tries ``x +- step_i e_i`` for each coordinate in turn, moves on any
    improvement (and widens that step), otherwise shrinks it.  Stops when every
    step is below ``min_rel_step`` of the initial one or after ``max_evals``
    evaluations.  The objective never increases.

    Returns
    -------
    x : ndarray
        Best point.
    converged : bool
        False when the evaluation cap was reached first.
    """
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    step = np.asarray(step0, dtype=float).copy()
    floor = step * min_rel_step
    fx = f(x)
    evals = 1
    while np.any(step > floor):
        for i in range(x.size):
            if step[i] <= floor[i]:
                continue
            moved = False
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] = np.clip(x[i] + sign * step[i], lo[i], hi[i])
                if trial[i] == x[i]:
                    continue
                ft = f(trial)
                evals += 1
                if ft < fx:
                    x, fx, moved = trial, ft, True
                    break
            step[i] *= grow if moved else shrink
            if evals >= max_evals:
                return x, False
    return x, True


# --- pipeline ---------------------------------------------------------------

def _fit_report(series, m):
    pred = eval_multilogistic_derivative(m, series.t)
    try:
        return fit_metrics(series.values, pred)
    except SeriesError:
        resid = series.values - pred
        return FitReport(np.nan, float(np.sqrt(np.mean(resid ** 2))), resid)


def _mark_edges(m, t_first, t_last):
    waves = [replace(w, edge=is_edge(w.a, w.b, t_first, t_last, EDGE_WIDTH))
             for w in m.waves]
    return m.with_waves(waves)


def _intercept(series, m):
    """Least-squares ``c`` matching the cumulative model to running totals."""
    y = np.cumsum(series.values)
    return float(np.mean(y - eval_multilogistic(replace(m, c=0.0), series.t)))


def _noise_sigma(x):
    """Robust noise scale from the MAD of first differences."""
    dx = np.diff(x)
    mad = np.median(np.abs(dx - np.median(dx)))
    return float(mad / 0.6745 / np.sqrt(2.0))


def _near(e, waves, radius):
    d_alpha, d_beta = radius
    return any(abs(e.alpha - w.a) <= d_alpha and abs(e.beta - w.b) <= d_beta for w in waves)


def _fit_carriers(series, cfg, m):
    """Broad waves from the wide scale grid, fitted with a Cauchy loss.

    At most ``cfg.max_carriers`` extrema with scale beyond the detail grid
    are taken, strongest first; the count limit replaces the noise floor,
    which at these scales is inflated by the carriers themselves.  The
    robust loss stops the broad components from bending to absorb the
    narrow waves that are still unmodelled at this stage.
    """
    detail_max = max(cfg.alpha_grid)
    alpha_max = max(cfg.carrier_alpha_grid)
    n = min(cfg.max_carriers, cfg.max_waves)
    if n < 1 or alpha_max <= detail_max:
        return m
    sc = scalogram(first_difference(series), cfg.carrier_alpha_grid, cfg.beta_grid,
                   workers=cfg.workers)
    level = 0.0 if cfg.min_abs_cwt is None else cfg.min_abs_cwt
    found = [e for e in find_extrema(sc, level, cfg.exclusion_radius) if e.alpha > detail_max]
    if not found:
        return m
    m = m.with_waves([_wave_from(e) for e in found[:n]])
    if not cfg.refine:
        return m
    scale = 2.0 * max(_noise_sigma(series.values), 1e-12)
    span = float(series.t[-1] - series.t[0])
    idx = range(len(m.waves))
    for _ in range(10):
        # re-anchor each round so a carrier can travel further than one box,
        # but stop once a scale exceeds the observed span
        nxt = refine_parameters(series, m, max_evals=cfg.max_refine_evals,
                                loss="cauchy", f_scale=scale)
        if any(w.a > span for w in nxt.waves):
            break
        done = np.allclose(_pack(nxt, idx), _pack(m, idx), rtol=1e-7)
        m = nxt
        if done:
            break
    log.info("carrier pass: %d waves", len(m.waves))
    return m


def decompose(series, cfg=DecompositionConfig()):
    """Decompose a monthly series into drift plus logistic solitary waves.

    Parameters
    ----------
    series : TimeSeries
        Monthly observations (the differential data, not running totals).
    cfg : DecompositionConfig

    Returns
    -------
    model : MultilogisticModel
        Waves ordered by decreasing ``|amplitude|`` with ids ``"1", "2", ...``
        and edge flags set.
    report : FitReport
        Fit of the derivative model to ``series``.

    Notes
    -----
    Broad carriers are located first on ``cfg.carrier_alpha_grid`` and
    fitted robustly.  Detail waves are then added one at a time: the
    residual is differenced and scanned on ``cfg.alpha_grid``, the strongest
    extremum above the noise floor that is not close to an existing or
    previously tried wave is added, and the detail waves are refined with
    bounds held around their detection values.  Waves that collapse to a
    negligible amplitude are dropped.  A final joint refinement moves every
    wave and the drift.  The result is deterministic.
    """
    if len(series) < 20:
        raise SeriesError(f"decomposition needs at least 20 observations, got {len(series)}")
    t, x = series.t, series.values
    t_first, t_last = float(t[0]), float(t[-1])
    evals = cfg.max_refine_evals

    m = MultilogisticModel(c=0.0, d=float(np.median(x)))
    m = _fit_carriers(series, cfg, m)
    n_carriers = len(m.waves)
    anchors = list(m.waves)
    tried = []
    report = _fit_report(series, m)

    while len(m.waves) < cfg.max_waves:
        if m.waves and report.r_squared >= cfg.stop_r2:
            break
        resid = TimeSeries(x - eval_multilogistic_derivative(m, t), t)
        sc = scalogram(first_difference(resid), cfg.alpha_grid, cfg.beta_grid,
                       workers=cfg.workers)
        level = cfg.min_abs_cwt if cfg.min_abs_cwt is not None else noise_floor(sc)
        found = [e for e in significant_extrema(sc, level, cfg.exclusion_radius)
                 if not _near(e, list(m.waves) + tried, cfg.exclusion_radius)]
        if not found:
            break
        w = _wave_from(found[0])
        tried.append(w)
        anchors.append(w)
        m = m.with_waves(m.waves + (w,))
        if cfg.refine:
            m = refine_parameters(series, m, which=range(n_carriers, len(m.waves)),
                                  max_evals=evals, anchors=anchors)
            keep = [i for i, v in enumerate(m.waves)
                    if abs(v.amplitude) > 1e-3 * abs(anchors[i].amplitude)]
            if len(keep) < len(m.waves):
                m = m.with_waves([m.waves[i] for i in keep])
                anchors = [anchors[i] for i in keep]
        report = _fit_report(series, m)
        log.info("wave %d at (%.1f, %.1f): R^2 = %.6f", len(m.waves), w.a, w.b,
                 report.r_squared)

    if m.waves and cfg.refine:
        m = refine_parameters(series, m, max_evals=evals, anchors=anchors)
    if not m.waves:
        m = replace(m, d=float(np.mean(x)))
    report = _fit_report(series, m)
    waves = sorted(m.waves, key=_wave_order_key)
    waves = [replace(w, id=str(k + 1)) for k, w in enumerate(waves)]
    m = _mark_edges(m.with_waves(waves), t_first, t_last)
    m = replace(m, c=_intercept(series, m))
    return m, report
