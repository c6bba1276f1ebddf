"""Residuals, local degrees, annulus energies and decay fits for vortex solutions."""

from __future__ import annotations

import csv
import json
import math

import numpy as np
from scipy import ndimage

from .config import ZeroConfig
from .errors import AmbiguousZero, InsufficientRange, ValidationError, WindingAmbiguous
from .grid import Grid
from .maslov import winding_number

__all__ = [
    "residual_report", "residual_mask", "local_degrees", "winding_degrees",
    "annulus_energy", "annulus_check", "decay_exponent", "decay_slope",
    "write_solution_csv", "write_summary_json",
]

# residuals are taken this far (plane units) from zeros and from the rim
RESIDUAL_MARGIN = 1.0


def residual_mask(sol, margin: float = RESIDUAL_MARGIN) -> np.ndarray:
    g = sol.grid
    m = g.r <= g.radius - margin
    for p in sol.config.positions:
        m &= np.abs(g.z - p) >= margin
    return m


def residual_report(sol, margin: float = RESIDUAL_MARGIN):
    """Sup-norms of the two trivialised vortex equations on interior points.

    First:  d_s f + i phi f + i (d_t f + i psi f)
    Second: d_s psi - d_t phi + (1 - |f|^2) / 2
    """
    g = sol.grid
    f, phi, psi = sol.f, sol.phi, sol.psi
    r1 = g.d_s(f) + 1j * phi * f + 1j * (g.d_t(f) + 1j * psi * f)
    r2 = g.d_s(psi) - g.d_t(phi) + 0.5 * (1.0 - (f.real ** 2 + f.imag ** 2))
    m = residual_mask(sol, margin)
    if not m.any():
        return 0.0, 0.0
    return float(np.abs(r1[m]).max()), float(np.abs(r2[m]).max())


# -- local degrees ------------------------------------------------------------

def _circle(center, radius, spacing):
    m = max(64, int(math.ceil(2 * math.pi * radius / (0.25 * spacing))))
    return center + radius * np.exp(2j * np.pi * np.arange(m) / m)


def _refine(grid, mod, i, j, n):
    """Sub-cell zero position from a quadratic fit of |f|^(2/n) on a 5x5 patch."""
    lo_i, hi_i = max(i - 2, 0), min(i + 3, grid.n)
    lo_j, hi_j = max(j - 2, 0), min(j + 3, grid.n)
    ii, jj = np.meshgrid(np.arange(lo_i, hi_i), np.arange(lo_j, hi_j), indexing="ij")
    u = (ii - i).ravel() * grid.spacing
    v = (jj - j).ravel() * grid.spacing
    q = mod[lo_i:hi_i, lo_j:hi_j].ravel() ** (2.0 / n)
    A = np.column_stack([np.ones_like(u), u, v, u * u, u * v, v * v])
    c, *_ = np.linalg.lstsq(A, q, rcond=None)
    H = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]])
    base = complex(grid.z[i, j])
    if np.linalg.det(H) <= 0 or H[0, 0] <= 0:
        return base
    du, dv = np.linalg.solve(H, -c[1:3])
    if math.hypot(du, dv) > 2 * grid.spacing:
        return base
    return base + complex(du, dv)


def winding_degrees(grid: Grid, f, probe_radius: float | None = None,
                    threshold: float = 0.5) -> ZeroConfig:
    """Zeros of a sampled complex field with their winding numbers.

    Candidates are grid-local minima of |f| below ``threshold``; the degree of
    each is the winding of f/|f| around a probe circle.
    """
    f = np.asarray(f, dtype=np.complex128)
    mod = np.abs(f)
    low = (mod == ndimage.minimum_filter(mod, size=3, mode="nearest")) & (mod < threshold)
    cand = [(mod[i, j], i, j) for i, j in zip(*np.nonzero(low))]
    cand.sort()
    # merge neighbouring candidates (ties of a zero sitting between cells)
    keep = []
    for val, i, j in cand:
        zc = grid.z[i, j]
        if all(abs(zc - grid.z[a, b]) > 3 * grid.spacing for _, a, b in keep):
            keep.append((val, i, j))
    if not keep:
        return ZeroConfig()
    auto = probe_radius is None

    def radius_for(centres):
        sep = min((abs(a - b) for k, a in enumerate(centres) for b in centres[k + 1:]), default=math.inf)
        rim = min(grid.radius - abs(c) for c in centres)
        r = min(3.0, 0.49 * sep, 0.49 * rim) if auto else probe_radius
        if not (r < 0.5 * sep and r < rim - 2 * grid.spacing):
            raise ValidationError(
                f"probe radius {r} must be below half the zero separation ({sep:.3g}) "
                f"and the distance to the boundary ({rim:.3g})")
        if r < 2 * grid.spacing:
            raise AmbiguousZero(f"probe radius {r} is below two grid cells")
        return r

    def wind(c, r):
        vals = grid.sample(f, _circle(c, r, grid.spacing))
        try:
            return winding_number(vals), np.abs(vals).max()
        except WindingAmbiguous as exc:
            raise AmbiguousZero(str(exc)) from None

    # first pass at cell centres gives the multiplicity needed for sub-cell refinement;
    # the threshold test then runs on circles around the refined positions
    centres = [complex(grid.z[i, j]) for _, i, j in keep]
    r0 = radius_for(centres)
    found = []
    for (_, i, j), c in zip(keep, centres):
        n, _ = wind(c, r0)
        if n < 0:
            raise AmbiguousZero(f"negative winding {n} around {c:.4g}")
        if n > 0:
            found.append((_refine(grid, mod, i, j, n), n))
    if not found:
        return ZeroConfig()
    r1 = radius_for([c for c, _ in found])
    entries = []
    for c, n in found:
        m, peak = wind(c, r1)
        if peak <= threshold:
            raise AmbiguousZero(f"|f| stays below {threshold} on the probe circle around {c:.4g}")
        if m != n:
            raise AmbiguousZero(f"winding around {c:.4g} changes from {n} to {m} with the probe")
        entries.append((c, n))
    return ZeroConfig(tuple(entries))


def local_degrees(sol, probe_radius: float | None = None) -> ZeroConfig:
    """Recover the zero configuration of a solution by the argument principle."""
    if sol.config.degree == 0:
        return ZeroConfig()
    return winding_degrees(sol.grid, sol.f, probe_radius)


# -- energies ---------------------------------------------------------------

def annulus_energy(sol, r: float, R: float) -> float:
    """Midpoint-rule energy over ``r < |z| < R`` (``R = inf`` means up to the rim)."""
    Rd = sol.grid.radius
    if math.isinf(R):
        R = Rd
    if not (0 <= r < R <= Rd + 1e-12):
        raise ValidationError(f"need 0 <= r < R <= {Rd}, got r={r}, R={R}")
    g = sol.grid
    mask = (g.r > r) & (g.r < R)
    return g.integrate(sol.energy_density, mask)


def annulus_check(sol, r: float, a: float, eps: float, R: float = math.inf):
    """Energy concentration bound ``E(A(ar, R/a)) <= 4 a^(-2+eps) E(A(r, R))``.

    ``R = inf`` is truncated to the computational disk. Returns (lhs, rhs, ok).
    """
    outer = R / a
    lhs = annulus_energy(sol, a * r, outer) if a * r < min(outer, sol.grid.radius) else 0.0
    rhs = 4.0 * a ** (-2.0 + eps) * annulus_energy(sol, r, R)
    return lhs, rhs, lhs <= rhs


def decay_slope(grid: Grid, density, fit_range, n_radii: int = 24) -> float:
    r_lo, r_hi = fit_range
    if n_radii < 10:
        raise InsufficientRange("at least 10 radii are required")
    if not (0 < r_lo < r_hi <= grid.radius):
        raise InsufficientRange(f"bad fit range {fit_range}")
    radii = np.geomspace(r_lo, r_hi, n_radii)
    peaks = []
    for r in radii:
        vals = grid.sample(density, _circle(0.0, r, grid.spacing))
        peaks.append(vals.max())
    peaks = np.array(peaks)
    if np.any(~(peaks > 0)):
        raise InsufficientRange("energy density vanishes on part of the fit range")
    slope, _ = np.polyfit(np.log(radii), np.log(peaks), 1)
    return float(slope)


def decay_exponent(sol, fit_range=(4.0, 10.0), n_radii: int = 24) -> float:
    """Least-squares slope of log(max_{|z|=r} e_w) against log r."""
    r_lo, r_hi = fit_range
    if not (1 <= r_lo < r_hi <= 0.8 * sol.grid.radius + 1e-12):
        raise ValidationError(f"fit range must satisfy 1 <= r_lo < r_hi <= {0.8 * sol.grid.radius:.4g}")
    return decay_slope(sol.grid, sol.energy_density, fit_range, n_radii)


# -- export ------------------------------------------------------------------

def write_solution_csv(sol, path, stride: int = 1) -> None:
    g = sol.grid
    sl = (slice(None, None, stride), slice(None, None, stride))
    cols = [g.z.real[sl], g.z.imag[sl], sol.h[sl], sol.f.real[sl], sol.f.imag[sl],
            sol.phi[sl], sol.psi[sl], sol.energy_density[sl]]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "h", "re_f", "im_f", "phi", "psi", "e_w"])
        for row in zip(*(c.ravel() for c in cols)):
            w.writerow([repr(float(v)) for v in row])


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
