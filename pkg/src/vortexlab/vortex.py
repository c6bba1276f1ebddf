"""Planar Ginzburg-Landau vortices for prescribed zeros.

Fields are trivialised over C: a Higgs field ``f`` and a connection
``Phi ds + Psi dt`` with ``Phi = i*phi``, ``Psi = i*psi``. The solver works
with ``h = log|f|^2`` split as ``h = h0 + w``, where

    h0 = sum_j n_j log(rho_j^2 / (1 + rho_j^2))

carries the logarithmic singularities, and ``w`` solves the smooth problem

    Lap w = exp(h0 + w) - 1 + sum_j 4 n_j / (1 + rho_j^2)^2,   w = 0 on |z| = R.

The discrete Laplacian is the fourth-order five-point-per-axis stencil.
Newton steps are solved with conjugate gradients preconditioned by an
algebraic multigrid hierarchy that is built once per grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from . import kernels
from .config import ZeroConfig, SolverParams, default_radius as _base_radius
from .errors import NonConvergence, ResolutionFailure, ValidationError
from .grid import Grid

log = logging.getLogger(__name__)

__all__ = [
    "VortexSolution", "solve_vortex", "default_params", "default_radius",
    "rim_modulus", "MAX_SPACING", "RIM_TARGET",
]

MAX_SPACING = 0.25
# smallest |f| the truncated vacuum may show on the rim for default radii
RIM_TARGET = 0.992
CG_RTOL = 1e-13


def rim_modulus(config: ZeroConfig, radius: float, samples: int = 720) -> float:
    """min over |z| = radius of |f| when w = 0 there (closed form in the zeros)."""
    z = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    logmod = np.zeros(samples)
    for p, n in config.zeros:
        r2 = np.abs(z - p) ** 2
        logmod += 0.5 * n * (np.log(r2) - np.log1p(r2))
    return float(np.exp(logmod).min())


def default_radius(config: ZeroConfig) -> float:
    """Default domain radius.

    At least ``max(12, 8 + max|z_j|)``, enlarged in steps of 0.5 until the
    Dirichlet rim keeps ``|f| >= RIM_TARGET``.
    """
    R = _base_radius(config)
    while config.degree and rim_modulus(config, R) < RIM_TARGET:
        R += 0.5
    return R


def default_params(config: ZeroConfig, **overrides) -> SolverParams:
    overrides.setdefault("domain_radius", default_radius(config))
    return SolverParams(**overrides)


@dataclass(frozen=True, eq=False)
class VortexSolution:
    config: ZeroConfig
    params: SolverParams
    h: np.ndarray
    f: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    energy_density: np.ndarray
    energy: float
    newton_iterations: int = 0
    newton_residual: float = 0.0
    grid: Grid = field(repr=False, default=None)

    def __post_init__(self):
        if self.grid is None:
            object.__setattr__(self, "grid",
                               Grid(self.params.domain_radius, self.params.grid_points_per_axis))
        for name in ("h", "f", "phi", "psi", "energy_density"):
            getattr(self, name).setflags(write=False)

    @property
    def degree(self) -> int:
        return self.config.degree

    @property
    def z(self):
        return self.grid.z

    def disk(self):
        return self.grid.disk()

    def sample_f(self, points):
        return self.grid.sample(self.f, points)

    def sample(self, name, points):
        return self.grid.sample(getattr(self, name), points)

    def summary(self) -> dict:
        from .diagnostics import residual_report
        r1, r2 = residual_report(self)
        return {
            "degree": self.degree,
            "energy": self.energy,
            "energy_over_pi": self.energy / math.pi,
            "residuals": [r1, r2],
            "newton_iterations": self.newton_iterations,
            "config": self.config.to_json(),
            "params": self.params.to_json(),
        }


# -- sparse operators ----------------------------------------------------------

@lru_cache(maxsize=2)
def _operators(radius: float, n: int):
    """Interior block of the 4th-order Laplacian and its AMG preconditioner."""
    import pyamg

    g = Grid(radius, n)
    hh = g.spacing
    e = np.ones(n)
    d4 = sp.diags([-e[2:], 16 * e[1:], -30 * e, 16 * e[1:], -e[2:]], [-2, -1, 0, 1, 2]) / (12 * hh * hh)
    d2 = sp.diags([e[1:], -2 * e, e[1:]], [-1, 0, 1]) / (hh * hh)
    eye = sp.identity(n, format="csr")
    inside = g.unknowns()
    idx = np.flatnonzero(inside.ravel())
    lap4 = (sp.kron(d4, eye) + sp.kron(eye, d4)).tocsr()[idx][:, idx].tocsr()
    lap2 = (sp.kron(d2, eye) + sp.kron(eye, d2)).tocsr()[idx][:, idx].tocsr()
    ml = pyamg.smoothed_aggregation_solver((-lap2 + sp.identity(idx.size)).tocsr())
    return inside, idx, lap4, ml.aspreconditioner()


def _sources(grid: Grid, config: ZeroConfig):
    h0 = np.zeros((grid.n, grid.n))
    src = np.zeros_like(h0)
    for p, n in config.zeros:
        r2 = np.abs(grid.z - p) ** 2
        with np.errstate(divide="ignore"):
            h0 += n * (np.log(r2) - np.log1p(r2))
        src += 4.0 * n / (1.0 + r2) ** 2
    return h0, src


def _newton(grid, config, params):
    inside, idx, lap4, precond = _operators(grid.radius, grid.n)
    h0, src = _sources(grid, config)
    # cells landing exactly on a zero: exp(h0) = 0 there, which is what we want
    h0_safe = np.where(np.isfinite(h0), h0, -np.inf)
    w = np.zeros_like(h0)
    hi = h0_safe.ravel()[idx]
    res = kernels.newton_residual(w, h0_safe, src, inside, grid.spacing)
    norm = float(np.abs(res).max())
    it = 0
    while norm > params.newton_tolerance:
        if it >= params.max_newton_iterations:
            raise NonConvergence(
                f"Newton stopped after {it} iterations with residual {norm:.3e}")
        eh = np.exp(hi + w.ravel()[idx])
        jac = (-lap4 + sp.diags(eh)).tocsr()
        step, info = sla.cg(jac, res.ravel()[idx], rtol=CG_RTOL, atol=0.0, M=precond, maxiter=2000)
        if info < 0 or not np.all(np.isfinite(step)):
            raise NonConvergence("linear solve failed inside Newton")
        t = params.damping
        for _ in range(8):
            trial = w.copy()
            trial.ravel()[idx] += t * step
            new_res = kernels.newton_residual(trial, h0_safe, src, inside, grid.spacing)
            new_norm = float(np.abs(new_res).max())
            if np.isfinite(new_norm) and (new_norm < norm or new_norm <= params.newton_tolerance):
                break
            t *= 0.5
        else:
            raise NonConvergence(f"no decrease along the Newton direction (residual {norm:.3e})")
        w, res, norm = trial, new_res, new_norm
        it += 1
        log.debug("newton %d: residual %.3e (step %.3g)", it, norm, t)
    return h0_safe, w, it, norm


def _fields(grid, config, w):
    dzw = grid.d_z(w)
    dzbw = grid.d_zbar(w)
    pos = np.array(config.positions, dtype=np.complex128)
    f, conn, dsf = kernels.reconstruct(grid.z.real, grid.z.imag, pos.real, pos.imag,
                                       config.multiplicities, w, dzw, dzbw)
    mod2 = f.real ** 2 + f.imag ** 2
    density = dsf.real ** 2 + dsf.imag ** 2 + 0.25 * (1.0 - mod2) ** 2
    return f, conn.real.copy(), conn.imag.copy(), density


def _vacuum(config, params):
    g = Grid(params.domain_radius, params.grid_points_per_axis)
    zero = np.zeros((g.n, g.n))
    return VortexSolution(config, params, zero.copy(), np.ones((g.n, g.n), dtype=np.complex128),
                          zero.copy(), zero.copy(), zero.copy(), 0.0, 0, 0.0, g)


def solve_vortex(config: ZeroConfig, params: SolverParams | None = None) -> VortexSolution:
    """Solve the vortex equations with zeros ``config`` on the disk of ``params``.

    Raises :class:`DomainTooSmall` if a zero sits within 8 units of the rim,
    :class:`ResolutionFailure` if the grid spacing exceeds 0.25, and
    :class:`NonConvergence` if Newton does not reach ``newton_tolerance``.
    """
    if not isinstance(config, ZeroConfig):
        raise ValidationError("config must be a ZeroConfig")
    if params is None:
        params = default_params(config)
    params.check_config(config)
    if config.degree == 0:
        return _vacuum(config, params)
    if params.spacing > MAX_SPACING:
        raise ResolutionFailure(
            f"grid spacing {params.spacing:.3f} exceeds {MAX_SPACING}; the vortex cores are unresolved")
    grid = Grid(params.domain_radius, params.grid_points_per_axis)
    h0, w, it, norm = _newton(grid, config, params)
    f, phi, psi, density = _fields(grid, config, w)
    energy = grid.integrate(density, grid.disk())
    return VortexSolution(config, params, h0 + w, f, phi, psi, density, energy, it, norm, grid)
