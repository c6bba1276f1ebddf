"""Weighted Lebesgue and Sobolev norms on planar grids, membership of
polynomials in weighted spaces, a numerical Hardy inequality and the
verification of the kernel of d/dz-bar on ``C p_d + L^{1,p}_{lam-1-d}``.

Weights use the Japanese bracket ``<x> = sqrt(1 + |x|^2)``; the Hardy check
uses the homogeneous weight ``|x|``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DivergentWeight, UnsupportedOrder, ValidationError

__all__ = [
    "WeightParams", "GridFunction", "weighted_norm", "poly_in_weighted_space",
    "in_kernel_domain", "hardy_check", "HardyResult", "dbar_kernel_check", "FLAVORS",
]

FLAVORS = ("p_lambda", "L_kp_lambda", "W_kp_lambda")
HARDY_SLACK = 0.05
DBAR_TOL = 1e-10


@dataclass(frozen=True)
class WeightParams:
    p: float
    lam: float
    n: int = 2
    k: int = 0

    def __post_init__(self):
        if not (self.p > 1 and math.isfinite(self.p)):
            raise ValidationError(f"p = {self.p} must be a finite real > 1")
        if not math.isfinite(self.lam):
            raise ValidationError("lambda must be finite")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("dimension n must be a positive integer")
        if int(self.k) != self.k or self.k < 0:
            raise ValidationError("derivative order k must be a non-negative integer")

    def fredholm_regime(self) -> bool:
        """``1 - 2/p <= lam < 2 - 2/p``; the lower end is admitted (see README)."""
        return 1 - 2 / self.p - 1e-12 <= self.lam < 2 - 2 / self.p

    def to_json(self):
        return {"p": self.p, "lambda": self.lam, "n": self.n, "k": self.k}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(float(data["p"]), float(data["lambda"]), int(data.get("n", 2)), int(data.get("k", 0)))


class GridFunction:
    """Values on a uniform cell-centred grid, restricted to a disk or a rectangle.

    ``values`` has shape ``(nx, ny)`` or ``(nx, ny, c)`` for vector data.
    """

    def __init__(self, values, x, y, domain="square"):
        v = np.asarray(values)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if v.shape[:2] != (x.size, y.size):
            raise ValidationError("values shape does not match the grid axes")
        if x.size < 5 or y.size < 5:
            raise ValidationError("grid needs at least 5 points per axis")
        hx, hy = np.diff(x), np.diff(y)
        h = hx[0]
        if not (np.allclose(hx, h, rtol=1e-9) and np.allclose(hy, h, rtol=1e-9)):
            raise ValidationError("grid must be uniform with equal spacing on both axes")
        if not np.all(np.isfinite(v)):
            raise ValidationError("grid values must be finite")
        if domain not in ("square", "disk"):
            raise ValidationError("domain must be 'square' or 'disk'")
        self.values, self.x, self.y, self.h, self.domain = v, x, y, float(h), domain

    @classmethod
    def sample(cls, func, radius: float, n: int, domain="disk"):
        """Evaluate ``func(z)`` on the n x n cell-centred grid over ``[-radius, radius]^2``."""
        h = 2.0 * radius / n
        x = -radius + h * (np.arange(n) + 0.5)
        Z = x[:, None] + 1j * x[None, :]
        return cls(func(Z), x, x, domain)

    @classmethod
    def on_rectangle(cls, func, lo, hi, n: int):
        """Square cells on ``[lo, hi]^2``."""
        h = (hi - lo) / n
        x = lo + h * (np.arange(n) + 0.5)
        Z = x[:, None] + 1j * x[None, :]
        return cls(func(Z), x, x, "square")

    def like(self, values):
        return GridFunction(values, self.x, self.y, self.domain)

    @property
    def z(self):
        return self.x[:, None] + 1j * self.y[None, :]

    @property
    def radius(self) -> float:
        return min(abs(self.x[0]), abs(self.x[-1]), abs(self.y[0]), abs(self.y[-1])) + 0.5 * self.h

    def mask(self):
        if self.domain == "disk":
            return np.abs(self.z) <= self.radius
        return np.ones((self.x.size, self.y.size), dtype=bool)

    def outer_ring(self, cells: int = 2):
        r = np.abs(self.z)
        return self.mask() & (r > self.radius - cells * self.h)

    def modulus(self):
        a = np.abs(self.values)
        return np.sqrt(np.sum(a * a, axis=2)) if a.ndim == 3 else a

    def gradient(self):
        """``(d_1 u, d_2 u)`` componentwise, fourth order in the interior."""
        return self._diff(0), self._diff(1)

    def _diff(self, axis):
        if self.values.ndim == 2:
            return kernels.diff4(self.values, self.h, axis)
        return np.stack([kernels.diff4(self.values[..., c], self.h, axis)
                         for c in range(self.values.shape[2])], axis=2)

    def lp(self, weight, density_mod, p):
        m = self.mask()
        vals = np.where(m, (weight * density_mod) ** p, 0.0)
        return float(np.sum(vals) * self.h * self.h) ** (1.0 / p)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            comps = 1 if self.values.ndim == 2 else self.values.shape[2]
            header = ["s", "t"]
            for c in range(comps):
                header += [f"re{c}", f"im{c}"]
            wr.writerow(header)
            for i, s in enumerate(self.x):
                for j, t in enumerate(self.y):
                    row = [repr(float(s)), repr(float(t))]
                    v = np.atleast_1d(self.values[i, j])
                    for c in range(comps):
                        row += [repr(float(np.real(v[c]))), repr(float(np.imag(v[c])))]
                    wr.writerow(row)

    @classmethod
    def from_csv(cls, path, domain="square"):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, data = rows[0], np.array(rows[1:], dtype=float)
        if header[:2] != ["s", "t"] or (len(header) - 2) % 2:
            raise ValidationError("grid CSV needs columns s,t,re0,im0,...")
        x = np.unique(data[:, 0])
        y = np.unique(data[:, 1])
        if data.shape[0] != x.size * y.size:
            raise ValidationError("grid CSV is not a full tensor grid")
        comps = (len(header) - 2) // 2
        order = np.lexsort((data[:, 1], data[:, 0]))
        data = data[order]
        vals = data[:, 2::2] + 1j * data[:, 3::2]
        if np.all(data[:, 3::2] == 0):
            vals = data[:, 2::2]
        vals = vals.reshape(x.size, y.size, comps)
        if comps == 1:
            vals = vals[..., 0]
        return cls(vals, x, y, domain)


def _bracket(g: GridFunction):
    return np.sqrt(1.0 + np.abs(g.z) ** 2)


def _mod(a):
    a = np.abs(a)
    return np.sqrt(np.sum(a * a, axis=2)) if a.ndim == 3 else a


def weighted_norm(f: GridFunction, w: WeightParams, flavor: str = "p_lambda") -> float:
    """Quadrature value of ``||f||_{p,lam}``, ``||f||_{L^{k,p}_lam}`` or ``||f||_{W^{k,p}_lam}``.

    The Sobolev flavours sum the weighted L^p norms over multi-indices
    ``|alpha| <= k``; only ``k <= 1`` is supported on grids.
    """
    if flavor not in FLAVORS:
        raise ValidationError(f"unknown norm flavour {flavor!r}; expected one of {FLAVORS}")
    br = _bracket(f)
    base = f.lp(br ** w.lam, f.modulus(), w.p)
    if flavor == "p_lambda" or w.k == 0:
        return base
    if w.k > 1:
        raise UnsupportedOrder(f"derivative order {w.k} is not supported (k <= 1)")
    shift = 1 if flavor == "L_kp_lambda" else 0
    weight = br ** (w.lam + shift)
    return base + sum(f.lp(weight, _mod(d), w.p) for d in f.gradient())


def poly_in_weighted_space(k: int, d: int, w: WeightParams) -> bool:
    """Whether ``deg u = k`` satisfies ``k < d - lam + 1 - 2/p``."""
    return k < d - w.lam + 1 - 2 / w.p


def in_kernel_domain(k: int, d: int, w: WeightParams) -> bool:
    """Membership of ``z^k`` in ``C p_d + L^{1,p}_{lam-1-d}``; the first summand supplies ``z^d``."""
    return k == d or poly_in_weighted_space(k, d, w)


@dataclass(frozen=True)
class HardyResult:
    lhs: float
    rhs: float
    ok: bool
    y_inf: object
    constant: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ok))

    def to_json(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "ok": self.ok, "constant": self.constant,
                "y_inf": np.real_if_close(np.atleast_1d(self.y_inf)).tolist()}


def hardy_check(u: GridFunction, w: WeightParams, slack: float = HARDY_SLACK) -> HardyResult:
    """Compare ``||(u - y_inf)|x|^lam||_p`` with ``p/(lam + n/p) ||Du |x|^(lam+1)||_p``.

    ``y_inf`` is the mean of ``u`` over the outermost two-cell ring of the domain.
    """
    if not (w.p > w.n and w.lam > -w.n / w.p):
        raise DivergentWeight(
            f"Hardy inequality needs p > n and lambda > -n/p (p={w.p}, lambda={w.lam}, n={w.n})")
    if w.n != 2:
        raise ValidationError("grid Hardy check is planar (n = 2)")
    ring = u.outer_ring(2)
    vals = u.values
    y_inf = vals[ring].mean(axis=0)
    r = np.abs(u.z)
    lhs = u.lp(r ** w.lam, _mod(vals - y_inf), w.p)
    g1, g2 = u.gradient()
    du = np.sqrt(_mod(g1) ** 2 + _mod(g2) ** 2)
    const = w.p / (w.lam + w.n / w.p)
    rhs = const * u.lp(r ** (w.lam + 1), du, w.p)
    return HardyResult(lhs, rhs, bool(lhs <= rhs * (1 + slack)), y_inf, const)


def dbar_kernel_check(d: int, w: WeightParams, template: GridFunction | None = None) -> dict:
    """Verify the monomial kernel basis of d/dz-bar on its weighted domain.

    For ``z^k``, ``k = 0..d+1``: domain membership (expected for ``k <= d``,
    not for ``k = d + 1``) and the discrete d/dz-bar residual on the interior
    of ``template``.
    """
    if int(d) != d:
        raise ValidationError("d must be an integer")
    if not w.fredholm_regime():
        raise ValidationError(
            f"lambda = {w.lam} is outside [1 - 2/p, 2 - 2/p) for p = {w.p}")
    if d < 0:
        raise ValidationError("kernel accounting is implemented for d >= 0")
    if template is None:
        template = GridFunction.on_rectangle(lambda z: np.zeros(z.shape), -1.0, 1.0, 33)
    Z = template.z
    inner = (slice(2, -2), slice(2, -2))
    rows, ok = [], True
    for k in range(d + 2):
        vals = Z ** k
        dbar = 0.5 * (kernels.diff4(vals, template.h, 0) + 1j * kernels.diff4(vals, template.h, 1))
        res = float(np.abs(dbar[inner]).max())
        member = in_kernel_domain(k, d, w)
        expected = k <= d
        good = member == expected and res <= DBAR_TOL
        ok &= good
        rows.append({"k": k, "in_domain": member, "expected": expected,
                     "dbar_residual": res, "ok": good})
    counted = 2 * sum(1 for r in rows if r["in_domain"] and r["dbar_residual"] <= DBAR_TOL)
    return {"d": d, "params": w.to_json(), "monomials": rows, "kernel_real_dim": counted,
            "index": 2 + 2 * d, "cokernel_dim": 0, "ok": bool(ok and counted == 2 + 2 * d)}
