"""Points of Sym^d(S^2), the padding inclusion and a matching metric.

The sphere is C together with a distinguished point :data:`INF`; it is never
represented by a large float. Distances use the chordal metric of the unit
sphere (diameter 2).
"""

from __future__ import annotations

import itertools
import json
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import ZeroConfig
from .errors import DegreeExceeded, SizeMismatch, ValidationError

__all__ = [
    "INF", "is_inf", "SymPoint", "iota", "chordal", "sym_distance",
    "brute_force_distance", "in_subbasis_set", "boundary_margin",
]


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("vortexlab.INF")

    def __eq__(self, other):
        return other is self


INF = _Infinity()


def is_inf(z) -> bool:
    return z is INF


def as_sphere_point(z):
    if z is INF:
        return INF
    if isinstance(z, str) and z.strip().lower() in ("inf", "infinity", "∞"):
        return INF
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"{z!r} is not a finite complex number; use INF for infinity")
    return z


def _order(z):
    return (1, 0.0, 0.0) if z is INF else (0, z.real, z.imag)


def chordal(z, w) -> float:
    """Chordal distance on the unit sphere, accepting :data:`INF`."""
    if z is INF and w is INF:
        return 0.0
    if z is INF:
        z, w = w, z
    if w is INF:
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


class SymPoint:
    """Unordered multiset of ``d`` sphere points."""

    __slots__ = ("points",)

    def __init__(self, points=()):
        pts = sorted((as_sphere_point(p) for p in points), key=_order)
        object.__setattr__(self, "points", tuple(pts))

    def __setattr__(self, name, value):
        raise AttributeError("SymPoint is immutable")

    @property
    def size(self) -> int:
        return len(self.points)

    def finite(self) -> list:
        return [p for p in self.points if p is not INF]

    def count_inf(self) -> int:
        return sum(1 for p in self.points if p is INF)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        return isinstance(other, SymPoint) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return "SymPoint({" + ", ".join("∞" if p is INF else f"{p:g}" for p in self.points) + "})"

    def to_json(self) -> dict:
        return {"d": self.size,
                "points": ["inf" if p is INF else {"re": p.real, "im": p.imag} for p in self.points]}

    @classmethod
    def from_json(cls, data) -> "SymPoint":
        if isinstance(data, str):
            data = json.loads(data)
        pts = [p if isinstance(p, str) else complex(p["re"], p["im"]) for p in data["points"]]
        if "d" in data and int(data["d"]) != len(pts):
            raise ValidationError(f"declared size {data['d']} but {len(pts)} points given")
        return cls(pts)


def iota(config: ZeroConfig, d: int) -> SymPoint:
    """Zeros of ``config`` with multiplicity, padded with ``d - deg`` copies of infinity."""
    if config.degree > d:
        raise DegreeExceeded(f"configuration of degree {config.degree} does not fit in Sym^{d}")
    return SymPoint(config.points() + [INF] * (d - config.degree))


def _cost_matrix(a: SymPoint, b: SymPoint) -> np.ndarray:
    return np.array([[chordal(x, y) for y in b.points] for x in a.points], dtype=float)


def sym_distance(a: SymPoint, b: SymPoint) -> float:
    """Minimum total chordal cost over bijections between the two multisets."""
    if a.size != b.size:
        raise SizeMismatch(f"sizes differ: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    if a == b:
        return 0.0
    cost = _cost_matrix(a, b)
    rows, cols = linear_sum_assignment(cost)
    # fixed summation order over the canonical row order
    return float(math.fsum(cost[rows, cols]))


def brute_force_distance(a: SymPoint, b: SymPoint) -> float:
    """Reference implementation over all permutations (small sizes only)."""
    if a.size != b.size:
        raise SizeMismatch(f"sizes differ: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    cost = _cost_matrix(a, b)
    n = a.size
    return min(math.fsum(cost[i, s[i]] for i in range(n))
               for s in itertools.permutations(range(n)))


def in_subbasis_set(m: SymPoint, center, radius: float, d0: int, tol: float = 0.0) -> bool:
    """Membership of ``m`` in the subbasis set for the open chordal ball ``U``.

    True iff exactly ``d0`` points (with multiplicity) lie in ``U`` and none
    lies on its boundary sphere (within ``tol``).
    """
    center = as_sphere_point(center)
    inside = 0
    for p in m.points:
        r = chordal(p, center)
        if abs(r - radius) <= tol:
            return False
        inside += r < radius
    return inside == d0


def boundary_margin(m: SymPoint, center, radius: float) -> float:
    """Smallest chordal distance from a point of ``m`` to the boundary of the ball."""
    center = as_sphere_point(center)
    return min((abs(chordal(p, center) - radius) for p in m.points), default=math.inf)
