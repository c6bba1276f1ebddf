"""Independent radial oracle for a single zero of multiplicity n at the origin.

For rotationally symmetric data h = log|f|^2 solves the ODE
``h'' + h'/r = exp(h) - 1`` with ``h ~ 2n log r`` at 0 and ``h -> 0`` at
infinity. Writing ``h = 2n log r + g`` removes the singularity::

    g'' + g'/r = r^(2n) exp(g) - 1,    g(0) = a,  g'(0) = 0,

and ``a`` is found by shooting: too large and h crosses 0, too small and h
turns back down while negative.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ValidationError

__all__ = ["RadialProfile", "radial_profile"]


def _rhs(n):
    def f(r, y):
        g, gp = y
        return [gp, r ** (2 * n) * math.exp(g) - 1.0 - gp / r]
    return f


def _start(a, n, r0):
    # series through the first correction of each source term
    g = a - r0 ** 2 / 4 + math.exp(a) * r0 ** (2 * n + 2) / (4 * (n + 1) ** 2)
    gp = -r0 / 2 + math.exp(a) * r0 ** (2 * n + 1) / (2 * (n + 1))
    return [g, gp]


def _shoot(a, n, r0, r_max, dense=False):
    if 2 * n * math.log(r0) + _start(a, n, r0)[0] >= 0:
        return 1, None
    def crossed(r, y):
        return 2 * n * math.log(r) + y[0]
    crossed.terminal = True
    crossed.direction = 1

    def turned(r, y):
        return 2 * n / r + y[1]
    turned.terminal = True
    turned.direction = -1

    sol = solve_ivp(_rhs(n), (r0, r_max), _start(a, n, r0), method="DOP853",
                    rtol=1e-12, atol=1e-14, events=(crossed, turned), dense_output=dense)
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size:
        return -1, sol
    return 0, sol


class RadialProfile:
    """Shooting solution; call with radii to get h(r)."""

    def __init__(self, n, a, sol, r_valid):
        self.n = n
        self.a = a
        self._sol = sol
        self.r_valid = r_valid

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r > self.r_valid) or np.any(r <= 0):
            raise ValidationError(f"radius outside the trusted range (0, {self.r_valid:.3g}]")
        g = self._sol.sol(np.maximum(r, self._sol.t[0]))[0]
        return 2 * self.n * np.log(r) + g


def radial_profile(n: int, r_max: float = 10.0, r0: float = 1e-4) -> RadialProfile:
    """Profile h(r) for the degree-n radial vortex, trusted on (0, r_max]."""
    if n < 1:
        raise ValidationError("multiplicity must be >= 1")
    lo, hi = -20.0, 20.0
    if _shoot(lo, n, r0, 4 * r_max)[0] != -1 or _shoot(hi, n, r0, 4 * r_max)[0] != 1:
        raise ValidationError("shooting bracket failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        side = _shoot(mid, n, r0, 4 * r_max)[0]
        if side == 1:
            hi = mid
        elif side == -1:
            lo = mid
        else:
            lo = hi = mid
            break
    a = 0.5 * (lo + hi)
    _, sol = _shoot(a, n, r0, 4 * r_max, dense=True)
    # the trajectory leaves the separatrix near its end; trust up to where |h| is still tiny and monotone
    r_end = sol.t[-1]
    if r_end < r_max:
        raise ValidationError(f"oracle only reliable up to r = {r_end:.3g} < {r_max}")
    return RadialProfile(n, a, sol, r_max)
