"""Möbius transformations of the Riemann sphere as normalised 2x2 matrices."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .moduli import INF, as_sphere_point
from .errors import ValidationError

__all__ = ["Mobius"]


def _normalise(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-300:
        raise ValidationError("singular matrix does not define a Möbius map")
    if abs(det - 1) > 4e-16:  # keep already-normalised input bit-exact
        m = m / cmath.sqrt(det)
    # entries at round-off level relative to the matrix are exact zeros
    m = np.where(np.abs(m) <= 1e-15 * np.abs(m).max(), 0, m)
    for x in m.ravel():
        if abs(x) > 1e-15:
            if x.real < 0 or (x.real == 0 and x.imag < 0):
                m = -m
            break
    return m


POLE_EPS = 1e-14


class Mobius:
    """``z -> (a z + b) / (c z + d)`` with ``ad - bc = 1`` and a fixed sign convention."""

    __slots__ = ("m",)

    def __init__(self, a, b=None, c=None, d=None):
        if b is None:
            m = np.array(a, dtype=np.complex128).reshape(2, 2)
        else:
            m = np.array([[a, b], [c, d]], dtype=np.complex128)
        if not np.all(np.isfinite(m)):
            raise ValidationError("Möbius coefficients must be finite")
        m = _normalise(m)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("Mobius is immutable")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, c) -> "Mobius":
        return cls(1, complex(c), 0, 1)

    @classmethod
    def affine(cls, a, b) -> "Mobius":
        """``z -> a z + b``."""
        if a == 0:
            raise ValidationError("affine map needs a nonzero slope")
        return cls(a, b, 0, 1)

    @classmethod
    def rotation(cls, angle: float, centre=0) -> "Mobius":
        w = cmath.exp(1j * angle)
        return cls(w, centre * (1 - w), 0, 1)

    @property
    def coefficients(self):
        return tuple(complex(x) for x in self.m.ravel())

    def __call__(self, z):
        a, b, c, d = self.coefficients
        z = as_sphere_point(z)
        if z is INF:
            return INF if c == 0 else a / c
        den = c * z + d
        # relative test: z = -d/c computed in floating point lands within round-off of the pole
        if abs(den) <= POLE_EPS * (abs(c * z) + abs(d)):
            return INF
        return (a * z + b) / den

    def inverse(self) -> "Mobius":
        a, b, c, d = self.coefficients
        return Mobius(d, -b, -c, a)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        """Composition ``self o other``."""
        return Mobius(self.m @ other.m)

    def is_affine(self, tol: float = 0.0) -> bool:
        return abs(self.m[1, 0]) <= tol

    def is_translation(self, tol: float = 1e-12) -> bool:
        a, _, c, d = self.coefficients
        return abs(c) <= tol and abs(a - d) <= tol and abs(a * d - 1) <= tol

    def translation_vector(self) -> complex:
        a, b, _, d = self.coefficients
        return b / d

    def derivative_factor(self, z) -> float:
        """``|c z + d|^2``; the derivative is its reciprocal."""
        _, _, c, d = self.coefficients
        return abs(c * z + d) ** 2

    def distance(self, other: "Mobius") -> float:
        """Distance between normalised matrices (sign ambiguity removed)."""
        return float(min(np.abs(self.m - other.m).max(), np.abs(self.m + other.m).max()))

    def isclose(self, other: "Mobius", tol: float = 1e-9) -> bool:
        return self.distance(other) <= tol

    def is_identity(self, tol: float = 1e-12) -> bool:
        return self.isclose(Mobius.identity(), tol)

    def __eq__(self, other):
        return isinstance(other, Mobius) and np.array_equal(self.m, other.m)

    def __hash__(self):
        return hash(self.m.tobytes())

    def __repr__(self):
        a, b, c, d = self.coefficients
        return f"Mobius({a:.6g}, {b:.6g}, {c:.6g}, {d:.6g})"

    def to_json(self):
        return [[x.real, x.imag] for x in self.coefficients]

    @classmethod
    def from_json(cls, data):
        a, b, c, d = (complex(x[0], x[1]) for x in data)
        return cls(a, b, c, d)


def mobius_from_triples(src, dst) -> Mobius:
    """Unique Möbius map sending three distinct sphere points ``src`` to ``dst``."""
    def to_std(p, q, r):
        # map p -> 0, q -> 1, r -> INF
        p, q, r = (as_sphere_point(x) for x in (p, q, r))
        if r is INF:
            return Mobius(1, -p, 0, q - p)
        if p is INF:
            return Mobius(0, q - r, 1, -r)
        if q is INF:
            return Mobius(1, -p, 1, -r)
        return Mobius(q - r, -p * (q - r), q - p, -r * (q - p))
    return to_std(*dst).inverse() @ to_std(*src)


__all__.append("mobius_from_triples")
