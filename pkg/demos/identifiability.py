"""How precisely can the 22-wave parameters be estimated from one noisy series?

The Cramer-Rao bound sigma^2 (J^T J)^-1, with J the Jacobian of the
derivative model at the true parameters, is the smallest covariance any
unbiased estimator can reach under i.i.d. Gaussian noise.  Waves whose
standard deviations exceed a 3-month center tolerance or a 25% scale
tolerance cannot be recovered reliably by any method.

Run:  python3 demos/identifiability.py [sigma]
"""
import sys

import numpy as np

from logiwave.decomposition import _pack, _residual_fn
from logiwave.synthetic import synthesize, reference_model

sigma = float(sys.argv[1]) if len(sys.argv) > 1 else 50.0
truth = reference_model()
x = synthesize(truth)
which = list(range(len(truth.waves)))
_, jac = _residual_fn(x.t, x.values, truth, which)
J = jac(_pack(truth, which))
sd = np.sqrt(np.diag(sigma ** 2 * np.linalg.inv(J.T @ J)))

print(f"noise sigma = {sigma:g};  sd(d) = {sd[0]:.1f}\n")
print(f"{'id':>3} {'amp':>7} {'sd(b)':>7} {'sd(a)/a':>8}")
for k, w in enumerate(truth.waves):
    sa, sb = sd[1 + 3 * k], sd[2 + 3 * k]
    flag = "  <- large, poorly determined" if abs(w.amplitude) > 300 and (
        sb > 3 or sa / w.a > 0.25) else ""
    print(f"{w.id:>3} {w.amplitude:7.0f} {sb:7.2f} {sa / w.a:8.3f}{flag}")
