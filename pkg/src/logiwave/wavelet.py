"""Logistic function, its derivatives, and the logistic mother wavelet.

The mother wavelet is the second derivative of the standard logistic
function scaled by ``sqrt(30)`` so that its L2 norm is one.  Children are
``psi2((t - beta) / alpha)`` *without* the usual ``1/sqrt(alpha)`` factor;
that convention is what makes the saturation-level inversion in
:mod:`logiwave.cwt` come out as ``sqrt(30) * alpha * cwt``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

SQRT30 = np.sqrt(30.0)

#: Half-width of the mother-wavelet quadrature support; ``|psi2(40)| < 1e-16``.
SUPPORT = (-40.0, 40.0)


class AdmissibilityError(ArithmeticError):
    """The admissibility integral does not settle under grid refinement."""


@dataclass(frozen=True)
class WaveletParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"wavelet scale must be positive, got {self.alpha}")


def logistic(t):
    """Standard logistic ``1 / (1 + exp(-t))``."""
    return expit(t)


def logistic_d1(t):
    """First derivative ``x(1 - x)``."""
    return expit(t) * expit(-t)


def logistic_d2(t):
    """Second derivative ``x(1 - x)(1 - 2x)``, evaluated without cancellation."""
    p, q = expit(t), expit(-t)
    return p * q * (q - p)


def psi2(t):
    """Second-order normalized logistic mother wavelet, ``sqrt(30) * x''(t)``."""
    return SQRT30 * logistic_d2(t)


def psi2_child(t, p):
    """Child wavelet ``psi2((t - beta) / alpha)``.

    ``p`` is a `WaveletParams` or an ``(alpha, beta)`` pair.
    """
    if not isinstance(p, WaveletParams):
        p = WaveletParams(*p)
    return psi2((np.asarray(t, dtype=float) - p.beta) / p.alpha)


def l2_norm_squared(fn, support=SUPPORT, step=1e-3):
    """Trapezoidal estimate of the integral of ``fn(t)**2`` over ``support``.

    The trapezoid rule converges geometrically for smooth integrands that
    vanish at both ends of the interval, so the default grid reaches
    double-precision accuracy for the logistic wavelets.
    """
    if not step > 0:
        raise ValueError(f"quadrature step must be positive, got {step}")
    lo, hi = support
    n = int(round((hi - lo) / step)) + 1
    t = np.linspace(lo, hi, n)
    return float(np.trapezoid(np.asarray(fn(t), dtype=float) ** 2, t))


def _admissibility_integral(fn, step, support, xi_max):
    lo, hi = support
    t = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    w = np.full(t.size, t[1] - t[0])
    w[0] = w[-1] = 0.5 * w[0]
    f = np.asarray(fn(t), dtype=float) * w
    # midpoint nodes keep xi = 0 out of the grid
    xi = np.arange(0.5 * step, xi_max, step)
    re = np.empty(xi.size)
    im = np.empty(xi.size)
    for start in range(0, xi.size, 256):
        phase = np.outer(xi[start:start + 256], t)
        re[start:start + 256] = np.cos(phase) @ f
        im[start:start + 256] = -(np.sin(phase) @ f)
    power = (re ** 2 + im ** 2) / (2.0 * np.pi)
    # |psi_hat|^2 is even for real psi
    return float(2.0 * 2.0 * np.pi * np.sum(power / xi) * step)


def admissibility_check(fn=psi2, step=0.02, support=SUPPORT, xi_max=30.0,
                        rtol=1e-3):
    """Numerical value of the admissibility constant of ``fn``.

    Computes ``2*pi * integral |xi|^-1 |psi_hat(xi)|^2 dxi`` with the
    unitary Fourier transform evaluated by quadrature, once at ``step`` and
    once at ``step / 2``.

    Raises
    ------
    AdmissibilityError
        If the two estimates differ by more than ``rtol`` relative, which is
        what a function with nonzero mean produces (logarithmic growth as
        the grid approaches ``xi = 0``).
    """
    if not step > 0:
        raise ValueError(f"quadrature step must be positive, got {step}")
    coarse = _admissibility_integral(fn, step, support, xi_max)
    fine = _admissibility_integral(fn, step / 2, support, xi_max)
    if not np.isfinite(fine) or abs(fine - coarse) > rtol * abs(fine):
        raise AdmissibilityError(
            f"admissibility integral not converging: {coarse:.6g} -> {fine:.6g}")
    return fine
