"""Hot grid kernels, each with a numba loop version and a numpy version.

The public names dispatch on :data:`vortexlab._accel.USE_NUMBA`. Both paths
are kept bit-for-bit close (identical formulas, identical summation order
where a reduction is involved) and are compared in the test suite.

Grid arrays are indexed ``[i, j]`` with ``i`` along ``s`` (real axis) and
``j`` along ``t`` (imaginary axis).
"""

import numpy as np

from . import _accel
from ._accel import njit

__all__ = [
    "newton_residual",
    "diff4",
    "reconstruct",
    "bilinear",
    "phase_increments",
]


# --------------------------------------------------------------------------
# 4th-order Laplacian residual of the scalar vortex equation
# --------------------------------------------------------------------------

def _newton_residual_numpy(w, h0, src, mask, spacing):
    c = 1.0 / (12.0 * spacing * spacing)
    lap = np.zeros_like(w)
    core = (slice(2, -2), slice(2, -2))
    lap[core] = c * (
        -w[4:, 2:-2] + 16.0 * w[3:-1, 2:-2] - 30.0 * w[2:-2, 2:-2]
        + 16.0 * w[1:-3, 2:-2] - w[:-4, 2:-2]
        - w[2:-2, 4:] + 16.0 * w[2:-2, 3:-1] - 30.0 * w[2:-2, 2:-2]
        + 16.0 * w[2:-2, 1:-3] - w[2:-2, :-4]
    )
    res = lap - np.exp(h0 + w) + 1.0 - src
    return np.where(mask, res, 0.0)


@njit
def _newton_residual_numba(w, h0, src, mask, spacing):
    n0, n1 = w.shape
    c = 1.0 / (12.0 * spacing * spacing)
    out = np.zeros_like(w)
    for i in range(2, n0 - 2):
        for j in range(2, n1 - 2):
            if not mask[i, j]:
                continue
            lap = c * (
                -w[i + 2, j] + 16.0 * w[i + 1, j] - 30.0 * w[i, j]
                + 16.0 * w[i - 1, j] - w[i - 2, j]
                - w[i, j + 2] + 16.0 * w[i, j + 1] - 30.0 * w[i, j]
                + 16.0 * w[i, j - 1] - w[i, j - 2]
            )
            out[i, j] = lap - np.exp(h0[i, j] + w[i, j]) + 1.0 - src[i, j]
    return out


def newton_residual(w, h0, src, mask, spacing):
    """Residual ``L4 w - exp(h0 + w) + 1 - src`` on ``mask``, zero elsewhere.

    ``mask`` must not touch the two outermost grid rings.
    """
    if _accel.USE_NUMBA:
        return _newton_residual_numba(w, h0, src, mask, float(spacing))
    return _newton_residual_numpy(w, h0, src, mask, spacing)


# --------------------------------------------------------------------------
# 4th-order centred first derivative
# --------------------------------------------------------------------------

def _diff4_numpy(a, spacing, axis):
    a = np.moveaxis(a, axis, 0)
    out = np.empty_like(a)
    out[2:-2] = (8.0 * (a[3:-1] - a[1:-3]) - (a[4:] - a[:-4])) / (12.0 * spacing)
    # second order one-sided at the two edge rows
    out[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * spacing)
    out[1] = (a[2] - a[0]) / (2.0 * spacing)
    out[-2] = (a[-1] - a[-3]) / (2.0 * spacing)
    out[-1] = (3.0 * a[-1] - 4.0 * a[-2] + a[-3]) / (2.0 * spacing)
    return np.moveaxis(out, 0, axis)


@njit
def _diff4_axis0_numba(a, spacing):
    n0, n1 = a.shape
    out = np.empty_like(a)
    c = 1.0 / (12.0 * spacing)
    e = 1.0 / (2.0 * spacing)
    # row-major traversal: the inner loop runs along contiguous memory
    for i in range(2, n0 - 2):
        for j in range(n1):
            out[i, j] = (8.0 * (a[i + 1, j] - a[i - 1, j]) - (a[i + 2, j] - a[i - 2, j])) * c
    for j in range(n1):
        out[0, j] = (-3.0 * a[0, j] + 4.0 * a[1, j] - a[2, j]) * e
        out[1, j] = (a[2, j] - a[0, j]) * e
        out[n0 - 2, j] = (a[n0 - 1, j] - a[n0 - 3, j]) * e
        out[n0 - 1, j] = (3.0 * a[n0 - 1, j] - 4.0 * a[n0 - 2, j] + a[n0 - 3, j]) * e
    return out


@njit
def _diff4_axis1_numba(a, spacing):
    n0, n1 = a.shape
    out = np.empty_like(a)
    c = 1.0 / (12.0 * spacing)
    e = 1.0 / (2.0 * spacing)
    for i in range(n0):
        for j in range(2, n1 - 2):
            out[i, j] = (8.0 * (a[i, j + 1] - a[i, j - 1]) - (a[i, j + 2] - a[i, j - 2])) * c
        out[i, 0] = (-3.0 * a[i, 0] + 4.0 * a[i, 1] - a[i, 2]) * e
        out[i, 1] = (a[i, 2] - a[i, 0]) * e
        out[i, n1 - 2] = (a[i, n1 - 1] - a[i, n1 - 3]) * e
        out[i, n1 - 1] = (3.0 * a[i, n1 - 1] - 4.0 * a[i, n1 - 2] + a[i, n1 - 3]) * e
    return out


def diff4(a, spacing, axis):
    """Fourth-order centred derivative of a 2D grid array along ``axis``."""
    a = np.asarray(a)
    if a.shape[axis] < 5:
        raise ValueError("need at least 5 points along the differentiation axis")
    if _accel.USE_NUMBA and a.ndim == 2:
        if np.iscomplexobj(a):
            return diff4(a.real, spacing, axis) + 1j * diff4(a.imag, spacing, axis)
        a = np.ascontiguousarray(a, dtype=np.float64)
        if axis == 0:
            return _diff4_axis0_numba(a, float(spacing))
        return _diff4_axis1_numba(a, float(spacing))
    return _diff4_numpy(a, spacing, axis)


# --------------------------------------------------------------------------
# Field reconstruction from the scalar solution
# --------------------------------------------------------------------------
#
# With delta_j = z - z_j and rho_j = |delta_j|:
#   f          = exp(w/2) * prod_j delta_j**n_j * (1 + rho_j**2)**(-n_j/2)
#   phi + i psi = i dbar(w) - i sum_j n_j delta_j / (1 + rho_j**2)
#   D_s f      = f * (dz(w) - sum_j n_j conj(delta_j)/(1 + rho_j**2))
#                + sum_j n_j f / delta_j
# The last sum is evaluated without dividing, so every quantity is finite at
# the prescribed zeros.

def _reconstruct_numpy(zr, zi, zeros_re, zeros_im, mult, w, dzw, dzbw):
    z = zr + 1j * zi
    amp = np.exp(0.5 * w)
    conn = 1j * dzbw
    glog = dzw.astype(np.complex128, copy=True)
    factors = []
    for k in range(mult.size):
        delta = z - (zeros_re[k] + 1j * zeros_im[k])
        q = 1.0 + (delta.real * delta.real + delta.imag * delta.imag)
        n = mult[k]
        conn = conn - 1j * n * delta / q
        glog = glog - n * np.conj(delta) / q
        factors.append((delta, q, n))
    f = amp.astype(np.complex128)
    for delta, q, n in factors:
        f = f * delta ** n * q ** (-0.5 * n)
    dsf = f * glog
    for k, (_, _, nk) in enumerate(factors):
        fk = amp.astype(np.complex128)
        for m, (delta, q, n) in enumerate(factors):
            e = n - 1 if m == k else n
            fk = fk * delta ** e * q ** (-0.5 * n)
        dsf = dsf + nk * fk
    return f, conn, dsf


@njit
def _ipow(x, n):
    out = 1.0 + 0j
    for _ in range(n):
        out = out * x
    return out


@njit
def _rpow(x, n):
    out = 1.0
    for _ in range(n):
        out = out * x
    return out


@njit
def _reconstruct_numba(zr, zi, zeros_re, zeros_im, mult, w, dzw, dzbw):
    n0, n1 = w.shape
    nz = mult.size
    f = np.empty((n0, n1), dtype=np.complex128)
    conn = np.empty((n0, n1), dtype=np.complex128)
    dsf = np.empty((n0, n1), dtype=np.complex128)
    deltas = np.empty(nz, dtype=np.complex128)
    qs = np.empty(nz)
    scale = np.empty(nz)
    for i in range(n0):
        for j in range(n1):
            z = zr[i, j] + 1j * zi[i, j]
            amp = np.exp(0.5 * w[i, j])
            c = 1j * dzbw[i, j]
            g = dzw[i, j] + 0j
            for k in range(nz):
                d = z - (zeros_re[k] + 1j * zeros_im[k])
                q = 1.0 + (d.real * d.real + d.imag * d.imag)
                deltas[k] = d
                qs[k] = q
                scale[k] = _rpow(1.0 / np.sqrt(q), mult[k])
                c = c - 1j * mult[k] * d / q
                g = g - mult[k] * np.conj(d) / q
            fv = amp + 0j
            for k in range(nz):
                fv = fv * _ipow(deltas[k], mult[k]) * scale[k]
            ds = fv * g
            for k in range(nz):
                fk = amp + 0j
                for m in range(nz):
                    e = mult[m] - 1 if m == k else mult[m]
                    fk = fk * _ipow(deltas[m], e) * scale[m]
                ds = ds + mult[k] * fk
            f[i, j] = fv
            conn[i, j] = c
            dsf[i, j] = ds
    return f, conn, dsf


def reconstruct(zr, zi, zeros_re, zeros_im, mult, w, dzw, dzbw):
    """Return ``(f, phi + i*psi, D_s f)`` on the grid."""
    mult = np.asarray(mult, dtype=np.int64)
    args = (np.ascontiguousarray(zr, dtype=np.float64),
            np.ascontiguousarray(zi, dtype=np.float64),
            np.asarray(zeros_re, dtype=np.float64),
            np.asarray(zeros_im, dtype=np.float64),
            mult,
            np.ascontiguousarray(w, dtype=np.float64),
            np.ascontiguousarray(dzw, dtype=np.complex128),
            np.ascontiguousarray(dzbw, dtype=np.complex128))
    if _accel.USE_NUMBA:
        return _reconstruct_numba(*args)
    return _reconstruct_numpy(*args)


# --------------------------------------------------------------------------
# Bilinear sampling of a cell-centred grid
# --------------------------------------------------------------------------

def _bilinear_numpy(field, origin, spacing, ps, pt):
    n0, n1 = field.shape
    u = (ps - origin) / spacing
    v = (pt - origin) / spacing
    i = np.clip(np.floor(u).astype(np.int64), 0, n0 - 2)
    j = np.clip(np.floor(v).astype(np.int64), 0, n1 - 2)
    a = u - i
    b = v - j
    return ((1 - a) * (1 - b) * field[i, j] + a * (1 - b) * field[i + 1, j]
            + (1 - a) * b * field[i, j + 1] + a * b * field[i + 1, j + 1])


@njit
def _bilinear_numba(field, origin, spacing, ps, pt):
    n0, n1 = field.shape
    out = np.empty(ps.size, dtype=field.dtype)
    for k in range(ps.size):
        u = (ps[k] - origin) / spacing
        v = (pt[k] - origin) / spacing
        i = int(np.floor(u))
        j = int(np.floor(v))
        i = min(max(i, 0), n0 - 2)
        j = min(max(j, 0), n1 - 2)
        a = u - i
        b = v - j
        out[k] = ((1 - a) * (1 - b) * field[i, j] + a * (1 - b) * field[i + 1, j]
                  + (1 - a) * b * field[i, j + 1] + a * b * field[i + 1, j + 1])
    return out


def bilinear(field, origin, spacing, points):
    """Sample ``field`` (cell-centred, first centre at ``origin``) at complex ``points``."""
    points = np.asarray(points, dtype=np.complex128).ravel()
    ps = np.ascontiguousarray(points.real)
    pt = np.ascontiguousarray(points.imag)
    field = np.ascontiguousarray(field)
    if _accel.USE_NUMBA:
        return _bilinear_numba(field, float(origin), float(spacing), ps, pt)
    return _bilinear_numpy(field, origin, spacing, ps, pt)


# --------------------------------------------------------------------------
# Phase increments along a closed sampled loop
# --------------------------------------------------------------------------

def _phase_increments_numpy(values):
    nxt = np.roll(values, -1)
    return np.angle(nxt * np.conj(values))


@njit
def _phase_increments_numba(values):
    n = values.size
    out = np.empty(n)
    for k in range(n - 1):
        a = values[k + 1] * np.conj(values[k])
        out[k] = np.arctan2(a.imag, a.real)
    a = values[0] * np.conj(values[n - 1])
    out[n - 1] = np.arctan2(a.imag, a.real)
    return out


def phase_increments(values):
    """Wrapped phase steps ``arg(v[k+1] / v[k])`` of a closed loop, in ``(-pi, pi]``.

    The loop closes from the last sample back to the first.
    """
    values = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    if _accel.USE_NUMBA:
        return _phase_increments_numba(values)
    return _phase_increments_numpy(values)
