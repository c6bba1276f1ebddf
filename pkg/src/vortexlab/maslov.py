"""Maslov indices of sampled unitary loops, and index arithmetic.

On unitary loops the Salamon-Zehnder map reduces to the complex determinant,
so the Maslov index is twice the winding number of ``det`` around 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError, WindingAmbiguous, FieldNotUnimodular

__all__ = [
    "SymplecticLoop", "maslov_index", "winding_number", "sample_loop", "FAMILIES",
    "IndexData", "fredholm_index", "vortex_boundary_maslov", "chern_pairing",
]

UNITARY_TOL = 1e-9
STEP_LIMIT = 0.5


class SymplecticLoop:
    """Closed loop of unitary ``n x n`` matrices sampled at ``N >= 8n`` points.

    The last sample connects back to the first.
    """

    def __init__(self, samples, check: bool = True):
        a = np.array(samples, dtype=np.complex128)
        if a.ndim == 1:
            a = a.reshape(-1, 1, 1)
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise ValidationError(f"samples must have shape (N, n, n), got {a.shape}")
        self.samples = a
        self.samples.setflags(write=False)
        if check:
            self.validate()

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    def __len__(self):
        return self.samples.shape[0]

    def validate(self) -> None:
        N, n = len(self), self.n
        if N < 8 * n:
            raise ValidationError(f"need at least {8 * n} samples for n = {n}, got {N}")
        eye = np.eye(n)
        dev = np.abs(np.einsum("kji,kjl->kil", self.samples.conj(), self.samples) - eye).max()
        if dev > UNITARY_TOL:
            raise ValidationError(f"samples are not unitary (deviation {dev:.2e})")
        step = self.samples - np.roll(self.samples, -1, axis=0)
        opnorm = np.linalg.norm(step, ord=2, axis=(1, 2)).max()
        if opnorm >= STEP_LIMIT:
            raise ValidationError(
                f"consecutive samples differ by {opnorm:.3f} in operator norm (limit {STEP_LIMIT})")

    def concat(self, other: "SymplecticLoop") -> "SymplecticLoop":
        """Loop product: traverse ``self`` then ``other`` (both based at the same matrix)."""
        if other.n != self.n:
            raise ValidationError("loops act on different dimensions")
        return SymplecticLoop(np.concatenate([self.samples, other.samples]))

    def to_json(self) -> dict:
        return {"n": self.n, "samples": [
            [[[float(x.real), float(x.imag)] for x in row] for row in m] for m in self.samples]}

    @classmethod
    def from_json(cls, data) -> "SymplecticLoop":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            arr = np.array(data["samples"], dtype=float)
            samples = arr[..., 0] + 1j * arr[..., 1]
        except (KeyError, IndexError, ValueError, TypeError) as exc:
            raise ValidationError(f"malformed loop JSON: {exc}") from None
        return cls(samples)


def winding_number(values) -> int:
    """Winding number around 0 of a closed sampled curve in C \\ {0}.

    Raises :class:`WindingAmbiguous` if a phase step reaches pi/2.
    """
    values = np.asarray(values, dtype=np.complex128).ravel()
    if values.size == 0:
        raise ValidationError("empty curve")
    if np.any(values == 0):
        raise WindingAmbiguous("curve passes through 0")
    inc = kernels.phase_increments(values)
    worst = float(np.abs(inc).max())
    if worst >= math.pi / 2:
        raise WindingAmbiguous(f"phase step {worst:.3f} >= pi/2; sample the loop more finely")
    total = math.fsum(inc) / (2 * math.pi)
    return int(round(total))


def maslov_index(loop: SymplecticLoop) -> int:
    """Twice the winding number of ``det`` along the loop."""
    det = np.linalg.det(loop.samples)
    return 2 * winding_number(det)


# -- closed-form families ------------------------------------------------------

def _zd_id(z, d, n):
    return (z ** d)[:, None, None] * np.eye(n)[None]


def _diag(z, ds, n):
    out = np.zeros((z.size, n, n), dtype=np.complex128)
    for k, dk in enumerate(ds):
        out[:, k, k] = z ** dk
    return out


FAMILIES = ("const", "zd-id", "diag")


def sample_loop(family: str, d=1, n: int = 1, N: int | None = None) -> SymplecticLoop:
    """Sample a closed-form loop on the unit circle.

    ``family``: ``const`` (identity), ``zd-id`` (z^d Id_n) or ``diag``
    (diag(z^d_1, ..., z^d_n) with ``d`` a sequence of length n).
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if family == "diag":
        ds = [int(x) for x in np.atleast_1d(d)]
        if len(ds) != n:
            raise ValidationError(f"diag family needs {n} exponents, got {len(ds)}")
    else:
        ds = [int(d)] * n
    dmax = max(abs(x) for x in ds)
    if N is None:
        N = max(8 * n, 64 * (1 + dmax) * n)
    z = np.exp(2j * np.pi * np.arange(N) / N)
    if family == "const":
        samples = np.broadcast_to(np.eye(n, dtype=np.complex128), (N, n, n))
    elif family == "zd-id":
        samples = _zd_id(z, ds[0], n)
    elif family == "diag":
        samples = _diag(z, ds, n)
    else:
        raise ValidationError(f"unknown loop family {family!r}; choose from {FAMILIES}")
    return SymplecticLoop(samples)


# -- vortex boundary transport ------------------------------------------------

def vortex_boundary_maslov(sol, radius: float | None = None) -> int:
    """Maslov index of the boundary transport of a solved vortex.

    In the abelian model the transport around the circle of the given radius
    is the 1 x 1 unitary loop ``f/|f|``; its index is twice the degree.
    """
    R = sol.params.domain_radius
    h = sol.params.spacing
    lo, hi = 0.8 * R, R - 2 * h
    if radius is None:
        radius = 0.5 * (lo + hi)
    if not lo - 1e-12 <= radius <= hi + 1e-12:
        raise ValidationError(f"radius {radius} outside the admissible range [{lo:.4g}, {hi:.4g}]")
    if sol.config.degree == 0:
        return 0
    N = max(256, int(math.ceil(2 * math.pi * radius / (0.5 * h))))
    pts = radius * np.exp(2j * np.pi * np.arange(N) / N)
    vals = sol.sample_f(pts)
    mod = np.abs(vals)
    if mod.min() < 0.9:
        raise FieldNotUnimodular(f"|f| = {mod.min():.3f} < 0.9 on the circle of radius {radius}")
    return maslov_index(SymplecticLoop((vals / mod).reshape(-1, 1, 1), check=False))


# -- index formula -------------------------------------------------------------

@dataclass(frozen=True)
class IndexData:
    dim_M: int
    dim_G: int
    chern_pairing: int

    def __post_init__(self):
        for name in ("dim_M", "dim_G", "chern_pairing"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValidationError(f"{name} must be an integer")
        if self.dim_M <= 0 or self.dim_M % 2:
            raise ValidationError("dim_M must be an even positive integer")
        if self.dim_G <= 0:
            raise ValidationError("dim_G must be a positive integer")


def fredholm_index(data: IndexData) -> int:
    """``dim M - 2 dim G + 2 <c_1^G, [W]>``.

    Pure formula evaluation; for the abelian plane model (dim M = 2 dim G)
    no Fredholm statement is implied.
    """
    return int(data.dim_M) - 2 * int(data.dim_G) + 2 * int(data.chern_pairing)


def chern_pairing(config) -> int:
    """Equivariant Chern number of the vortex class of ``config``: its degree."""
    return config.degree
