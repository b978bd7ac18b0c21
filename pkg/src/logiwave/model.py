"""Multilogistic model: affine drift plus a sum of logistic steps.

Cumulative form::

    y(t) = c + d t + sum_i y_sat_i / (1 + exp(-(t - b_i) / a_i))

Derivative form, which is what monthly observations are fitted with::

    y'(t) = d + sum_i y_sat_i / (4 a_i) * sech^2((t - b_i) / (2 a_i))
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import expit


@dataclass(frozen=True)
class LogisticWave:
    """One solitary-wave component.

    ``a`` is the slope scale and ``b`` the center, both in index units;
    ``y_sat`` is the total rise in the cumulative series (signed).
    """

    a: float
    b: float
    y_sat: float
    id: str = None
    edge: bool = False

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"wave scale must be positive, got {self.a}")

    @property
    def amplitude(self):
        """Peak of the derivative-space pulse, ``y_sat / (4 a)``."""
        return self.y_sat / (4.0 * self.a)

    def to_dict(self):
        return {"id": self.id, "a": float(self.a), "b": float(self.b),
                "y_sat": float(self.y_sat), "edge": bool(self.edge)}


@dataclass(frozen=True)
class MultilogisticModel:
    c: float = 0.0
    d: float = 0.0
    waves: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "waves", tuple(self.waves))

    def with_waves(self, waves, **changes):
        return replace(self, waves=tuple(waves), **changes)

    def to_dict(self, fit=None):
        out = {"c": float(self.c), "d": float(self.d)}
        if fit is not None:
            out.update(fit.to_dict())
        out["waves"] = [w.to_dict() for w in self.waves]
        return out

    @classmethod
    def from_dict(cls, data):
        waves = []
        for k, row in enumerate(data.get("waves", ())):
            waves.append(LogisticWave(
                a=float(row["a"]), b=float(row["b"]), y_sat=float(row["y_sat"]),
                id=str(row.get("id", k + 1)), edge=bool(row.get("edge", False))))
        return cls(c=float(data.get("c", 0.0)), d=float(data.get("d", 0.0)),
                   waves=tuple(waves))


def sech2(u):
    """``cosh(u)**-2`` without overflow for large ``|u|``."""
    return 4.0 * expit(2.0 * u) * expit(-2.0 * u)


def eval_multilogistic(m, t):
    """Cumulative-space model value at ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    out = m.c + m.d * t
    for w in m.waves:
        out = out + w.y_sat * expit((t - w.b) / w.a)
    return out


def eval_multilogistic_derivative(m, t):
    """Derivative-space model ``d + sum y_sat/(4a) sech^2((t-b)/(2a))``; ``c`` drops out."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, float(m.d)) if t.ndim else float(m.d)
    for w in m.waves:
        out = out + w.amplitude * sech2((t - w.b) / (2.0 * w.a))
    return out


def eval_multilogistic_derivative_exp(m, t):
    """The same derivative written as ``y_sat e^-z / (a (1 + e^-z)^2)``, ``z = (t-b)/a``.

    Kept for cross-checking the hyperbolic form; overflows for
    ``(t - b) / a`` below about -700.
    """
    t = np.asarray(t, dtype=float)
    out = m.d
    for w in m.waves:
        e = np.exp(-(t - w.b) / w.a)
        out = out + w.y_sat * e / (w.a * (1.0 + e) ** 2)
    return out


def load_model(path):
    with Path(path).open(encoding="utf-8") as fh:
        return MultilogisticModel.from_dict(json.load(fh))
