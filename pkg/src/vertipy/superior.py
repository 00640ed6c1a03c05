"""Superiorization: steer a feasibility-seeking operator by small perturbations.

Given an operator T whose fixed points are the feasible set, each pass
perturbs the current iterate by a step of size theta (halved every pass,
accepted or not) along the ray through the anchor v, and keeps T of the
perturbed point only if the perturbation did not move away from v and T
improved the proximity measure; otherwise the iterate is left unchanged.

Two perturbation directions are available.  ``"away"`` uses
x~ = x + theta (x - v)/||x - v||, the scheme's defining recursion: its
norm-acceptance test ||x~ - v|| <= ||x - v|| can then only pass at x = v
itself, so the method performs a single accepted T step from the anchor and
afterwards leaves the iterate unchanged while theta decays.  ``"toward"``
flips the sign, so perturbations reduce ||x - v|| and acceptance depends
only on T improving proximity -- the behavior to use when the goal is
actually steering toward the anchor.  The default is ``"away"``.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import InvalidSpecError
from .metrics import StopRule, proximity_squared_sum

__all__ = ["Superiorized", "superiorize"]


class Superiorized:
    """Driver-compatible superiorized wrapper around a step operator."""

    kind = "super"

    def __init__(self, base_step, sets, v, direction: str = "away"):
        if direction not in ("away", "toward"):
            raise InvalidSpecError(f"direction must be 'away' or 'toward', got {direction!r}")
        self.base_step = base_step
        self.sets = list(sets)
        self.v = np.asarray(v, dtype=float)
        self.sign = 1.0 if direction == "away" else -1.0
        self.x = self.v.copy()
        self.theta = 1.0
        self._d2 = proximity_squared_sum(self.x, self.sets)

    def step(self):
        x = self.x
        offset = x - self.v
        norm = float(np.linalg.norm(offset))
        if norm > 0.0:
            xt = x + (self.sign * self.theta / norm) * offset
        else:
            xt = x
        self.theta *= 0.5
        if float(np.linalg.norm(xt - self.v)) <= norm:
            candidate = self.base_step(xt)
            d2 = proximity_squared_sum(candidate, self.sets)
            if d2 < self._d2:
                self.x = candidate
                self._d2 = d2

    def monitor(self):
        return self.x


def superiorize(base_step, sets, v, stop: StopRule | None = None, direction: str = "away"):
    """Run the superiorized loop until d < eps or the iteration cap.

    base_step maps a profile to a profile and must fix exactly the
    intersection of `sets` (e.g. one sweep of cyclic projections).  Returns
    (x_final, iterations, d_trace, converged); the trace holds the
    normalized proximity of each pass, starting at 1.0.  A feasible v
    returns immediately with trace [0.0].
    """
    stop = stop or StopRule()
    v = np.asarray(v, dtype=float)
    denom = proximity_squared_sum(v, sets)
    if denom == 0.0:
        return v.copy(), 0, [0.0], True
    state = Superiorized(base_step, sets, v, direction=direction)
    trace = [1.0]
    if trace[-1] < stop.eps:
        return v.copy(), 0, trace, True
    for k in range(1, stop.k_max + 1):
        state.step()
        d = math.sqrt(proximity_squared_sum(state.x, sets) / denom)
        trace.append(d)
        if d < stop.eps:
            return state.x, k, trace, True
    return state.x, stop.k_max, trace, False
