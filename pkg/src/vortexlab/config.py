"""Zero configurations (points of Sym^d(C)) and solver parameters."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict, replace

from .errors import ValidationError, DomainTooSmall

__all__ = ["ZeroConfig", "SolverParams", "MERGE_TOL"]

# two prescribed zeros closer than this are treated as coincident
MERGE_TOL = 1e-12


def _key(z: complex):
    return (z.real, z.imag)


@dataclass(frozen=True)
class ZeroConfig:
    """Finite multiset of zeros in the plane.

    Stored canonically: positions sorted by (real, imag), each with a
    multiplicity >= 1. Equality is therefore multiset equality.
    """

    zeros: tuple = ()

    def __post_init__(self):
        items = []
        for entry in self.zeros:
            try:
                pos, mult = entry
            except (TypeError, ValueError):
                raise ValidationError(f"zero entry {entry!r} is not (position, multiplicity)")
            pos = complex(pos)
            if not (math.isfinite(pos.real) and math.isfinite(pos.imag)):
                raise ValidationError(f"zero position {pos!r} is not finite")
            if isinstance(mult, bool) or int(mult) != mult or int(mult) < 1:
                raise ValidationError(f"multiplicity {mult!r} must be a positive integer")
            items.append((pos, int(mult)))
        items.sort(key=lambda e: _key(e[0]))
        for a, b in zip(items, items[1:]):
            if abs(a[0] - b[0]) <= MERGE_TOL:
                raise ValidationError(
                    f"zeros {a[0]} and {b[0]} coincide; merge them into one entry")
        object.__setattr__(self, "zeros", tuple(items))

    # -- construction -----------------------------------------------------
    @classmethod
    def from_points(cls, points, tol: float = MERGE_TOL) -> "ZeroConfig":
        """Build from a list of positions, merging coincident ones into multiplicities."""
        merged: list[list] = []
        for p in sorted((complex(p) for p in points), key=_key):
            for m in merged:
                if abs(m[0] - p) <= tol:
                    m[1] += 1
                    break
            else:
                merged.append([p, 1])
        return cls(tuple((p, n) for p, n in merged))

    @classmethod
    def from_json(cls, data) -> "ZeroConfig":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict) or "zeros" not in data:
            raise ValidationError("zero configuration JSON needs a 'zeros' list")
        try:
            return cls(tuple((complex(float(z["re"]), float(z["im"])), z["mult"])
                             for z in data["zeros"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed zero entry: {exc}") from None

    def to_json(self) -> dict:
        return {"zeros": [{"re": p.real, "im": p.imag, "mult": n} for p, n in self.zeros]}

    # -- accessors --------------------------------------------------------
    @property
    def degree(self) -> int:
        return sum(n for _, n in self.zeros)

    @property
    def positions(self) -> list:
        return [p for p, _ in self.zeros]

    @property
    def multiplicities(self) -> list:
        return [n for _, n in self.zeros]

    def points(self) -> list:
        """Positions repeated according to multiplicity."""
        return [p for p, n in self.zeros for _ in range(n)]

    def max_abs(self) -> float:
        return max((abs(p) for p in self.positions), default=0.0)

    def min_separation(self) -> float:
        ps = self.positions
        return min((abs(a - b) for i, a in enumerate(ps) for b in ps[i + 1:]),
                   default=math.inf)

    def translate(self, c: complex) -> "ZeroConfig":
        return ZeroConfig(tuple((p + c, n) for p, n in self.zeros))

    def centroid(self) -> complex:
        d = self.degree
        if d == 0:
            raise ValidationError("empty configuration has no centroid")
        return sum(p * n for p, n in self.zeros) / d

    def isclose(self, other: "ZeroConfig", tol: float = 1e-9) -> bool:
        if len(self.zeros) != len(other.zeros):
            return False
        used = [False] * len(other.zeros)
        for p, n in self.zeros:
            for k, (q, m) in enumerate(other.zeros):
                if not used[k] and m == n and abs(p - q) <= tol:
                    used[k] = True
                    break
            else:
                return False
        return True

    def __len__(self):
        return len(self.zeros)

    def __repr__(self):
        body = ", ".join(f"({p:g}, {n})" for p, n in self.zeros)
        return f"ZeroConfig({{{body}}})"


def default_radius(config: ZeroConfig) -> float:
    return max(12.0, 8.0 + config.max_abs())


@dataclass(frozen=True)
class SolverParams:
    domain_radius: float = 12.0
    grid_points_per_axis: int = 1024
    newton_tolerance: float = 1e-10
    max_newton_iterations: int = 30
    damping: float = 1.0
    residual_tolerance: float = 1e-4
    boundary_tolerance: float = 1e-2

    def __post_init__(self):
        if not (self.domain_radius > 0 and math.isfinite(self.domain_radius)):
            raise ValidationError("domain_radius must be a positive real")
        if int(self.grid_points_per_axis) != self.grid_points_per_axis or self.grid_points_per_axis < 16:
            raise ValidationError("grid_points_per_axis must be an integer >= 16")
        if not self.newton_tolerance > 0:
            raise ValidationError("newton_tolerance must be positive")
        if int(self.max_newton_iterations) != self.max_newton_iterations or self.max_newton_iterations < 1:
            raise ValidationError("max_newton_iterations must be a positive integer")
        if not 0 < self.damping <= 1:
            raise ValidationError("damping must lie in (0, 1]")
        if not (self.residual_tolerance > 0 and self.boundary_tolerance > 0):
            raise ValidationError("tolerances must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.domain_radius / self.grid_points_per_axis

    @classmethod
    def for_config(cls, config: ZeroConfig, **overrides) -> "SolverParams":
        overrides.setdefault("domain_radius", default_radius(config))
        return cls(**overrides)

    def check_config(self, config: ZeroConfig, margin: float = 8.0) -> None:
        if config.degree and self.domain_radius < margin + config.max_abs() - 1e-12:
            raise DomainTooSmall(
                f"domain radius {self.domain_radius} leaves less than {margin} between "
                f"the zeros (max |z| = {config.max_abs():.4g}) and the boundary")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data) -> "SolverParams":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None

    def with_(self, **kw) -> "SolverParams":
        return replace(self, **kw)
