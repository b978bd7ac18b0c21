"""Wave chains: straight trend lines through wave peaks.

A chain is a run of same-signed waves, ordered by center ``b``, whose peak
amplitudes ``A_i = y_sat_i / (4 a_i)`` fall close to a line.  The ratio
``A_i / b_i`` is reported per member as a dispersion diagnostic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: A chain of this many members carries the reversal annotation.
REVERSAL_MEMBERS = 3


class ChainError(ValueError):
    pass


def amplitude(w):
    """Signed derivative-space peak ``y_sat / (4a)``."""
    if not w.a > 0:
        raise ValueError(f"wave scale must be positive, got {w.a}")
    return w.y_sat / (4.0 * w.a)


@dataclass(frozen=True)
class WaveChain:
    member_ids: tuple
    slope: float
    intercept: float
    residual_rms: float
    ratios: tuple
    chain_id: str = None

    @property
    def reversal_flag(self):
        return len(self.member_ids) >= REVERSAL_MEMBERS

    def to_dict(self):
        return {"chain_id": self.chain_id, "member_ids": list(self.member_ids),
                "slope": self.slope, "intercept": self.intercept,
                "residual_rms": self.residual_rms, "ratios": list(self.ratios),
                "reversal_flag": self.reversal_flag}


def _sort_key(w):
    return (w.b, w.a, w.y_sat, str(w.id))


def _line(members):
    b = np.array([w.b for w in members], dtype=float)
    amp = np.array([amplitude(w) for w in members])
    if np.ptp(b) == 0:
        raise ChainError("chain members share one center; no line through them")
    slope, intercept = np.polyfit(b, amp, 1)
    resid = amp - (slope * b + intercept)
    ratios = tuple(float(x) for x in amp / b) if np.all(b != 0) else \
        tuple(float(x) / float(y) if y else float("nan") for x, y in zip(amp, b))
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))), ratios


def fit_chain(waves, member_ids, chain_id=None):
    """Least-squares line ``A = slope * b + intercept`` through the named waves.

    Raises
    ------
    ChainError
        Fewer than two members, mixed signs, or an unknown id.
    """
    by_id = {str(w.id): w for w in waves}
    missing = [i for i in member_ids if str(i) not in by_id]
    if missing:
        raise ChainError(f"unknown wave ids: {missing}")
    members = sorted((by_id[str(i)] for i in member_ids), key=_sort_key)
    if len(members) < 2:
        raise ChainError("a chain needs at least two waves")
    if len({np.sign(w.y_sat) for w in members}) != 1 or members[0].y_sat == 0:
        raise ChainError("chain members must share one nonzero y_sat sign")
    slope, intercept, rms, ratios = _line(members)
    return WaveChain(tuple(str(w.id) for w in members), slope, intercept, rms,
                     ratios, chain_id)


def extrapolate_next(chain, b_next):
    """The chain's line evaluated at ``b_next``; ``chain.residual_rms`` is the error proxy."""
    return chain.slope * b_next + chain.intercept


def auto_group(waves, tol=0.3):
    """Candidate chains found mechanically.

    Waves of each sign are ordered by ``b``; a chain is a maximal run of
    consecutive waves in that order whose ratio ``A/b`` changes by less
    than ``tol`` (relative) from one member to the next.  Runs without two
    distinct centers are dropped, since no line passes through them.  The
    result does not depend on the order of ``waves``.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    chains = []
    for sign in (1.0, -1.0):
        side = sorted((w for w in waves if np.sign(w.y_sat) == sign and w.b != 0),
                      key=_sort_key)
        runs = [side[:1]]
        for prev, cur in zip(side, side[1:]):
            r0, r1 = amplitude(prev) / prev.b, amplitude(cur) / cur.b
            if abs(r1 - r0) < tol * abs(r0):
                runs[-1].append(cur)
            else:
                runs.append([cur])
        chains += [run for run in runs if len({w.b for w in run}) >= 2]
    chains.sort(key=lambda run: _sort_key(run[0]))
    out = []
    for k, run in enumerate(chains):
        slope, intercept, rms, ratios = _line(run)
        out.append(WaveChain(tuple(str(w.id) for w in run), slope, intercept, rms,
                             ratios, f"chain-{k + 1}"))
    return out


def write_chains(chains, path):
    path = Path(path)
    path.write_text(json.dumps([c.to_dict() for c in chains], indent=2) + "\n",
                    encoding="utf-8")
    return path
