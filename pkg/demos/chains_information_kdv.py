"""Wave chains, information measures and the KdV residual check, end to end.

Run:  python3 demos/chains_information_kdv.py
"""
import itertools

import numpy as np

from logiwave import (DiscreteDistribution, auto_group, configurational_information_3,
                      extrapolate_next, mutual_redundancy)
from logiwave.kdv import GridFunction, kdv_residual, soliton
from logiwave.synthetic import reference_model

# %% Chains among the published waves: same sign, ratio A/b steady along b.
for chain in auto_group(reference_model().waves):
    tag = "  (third wave: reversal)" if chain.reversal_flag else ""
    print(f"{chain.chain_id}: waves {', '.join(chain.member_ids)}, slope {chain.slope:.3f}{tag}")
    last = max(w.b for w in reference_model().waves if w.id in chain.member_ids)
    print(f"   line at b = {last + 50:.0f}: {extrapolate_next(chain, last + 50):.0f}"
          f" +- {chain.residual_rms:.0f}")

# %% Three-way information: XOR is purely synergetic, copies purely redundant.
xor = DiscreteDistribution([(a, b, a ^ b) for a, b in itertools.product((0, 1), repeat=2)],
                           [0.25] * 4)
copies = DiscreteDistribution([(0, 0, 0), (1, 1, 1)], [0.5, 0.5])
print(f"\nT123 xor = {configurational_information_3(xor):+.3f} bits, "
      f"copies = {configurational_information_3(copies):+.3f} bits")
print(f"R12 of two copies = {mutual_redundancy(DiscreteDistribution([(0, 0), (1, 1)], [.5, .5])):+.3f}")

# %% The classical soliton satisfies KdV up to the O(h^2) truncation error.
for h, tau in ((0.1, 0.002), (0.05, 0.001), (0.025, 0.0005)):
    xs = np.arange(-20, 20 + h / 2, h)
    g = GridFunction.sample(lambda x, t: soliton(1.0, x, t), xs, np.array([-tau, 0, tau]))
    print(f"h = {h:<6} residual = {kdv_residual(g):.3e}")
