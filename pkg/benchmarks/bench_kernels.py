"""Compare the numba and numpy paths of the grid kernels.

    python benchmarks/bench_kernels.py [--n 1024] [--repeat 5] [--solve]

Each kernel is timed on both paths (best of ``repeat`` after one warm-up
call that absorbs JIT compilation) and the outputs are compared.
``--solve`` also times a full solve on a 512 grid with each backend.
"""

import argparse
import time

import numpy as np

from vortexlab import _accel, kernels
from vortexlab.config import ZeroConfig
from vortexlab.grid import Grid


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    g = Grid(12.0, n)
    rng = np.random.default_rng(0)
    w = rng.normal(size=(n, n)) * 0.1
    h0 = -np.abs(rng.normal(size=(n, n)))
    src = np.abs(rng.normal(size=(n, n)))
    mask = g.unknowns()
    cfg = ZeroConfig(((-1 + 0j, 1), (1 + 0.5j, 2)))
    zr = np.array([p.real for p in cfg.positions])
    zi = np.array([p.imag for p in cfg.positions])
    mult = np.array(cfg.multiplicities)
    dzw = w + 0.3j * w
    pts = rng.uniform(-10, 10, 200_000) + 1j * rng.uniform(-10, 10, 200_000)
    loop = np.exp(2j * np.pi * np.arange(200_000) / 200_000 * 3)
    return {
        "newton_residual": lambda: kernels.newton_residual(w, h0, src, mask, g.spacing),
        "diff4": lambda: kernels.diff4(w, g.spacing, 1),
        "reconstruct": lambda: kernels.reconstruct(g.z.real, g.z.imag, zr, zi, mult, w, dzw, dzw.conj()),
        "bilinear": lambda: kernels.bilinear(w, g.origin, g.spacing, pts),
        "phase_increments": lambda: kernels.phase_increments(loop),
    }


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--solve", action="store_true")
    args = ap.parse_args()
    if _accel.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    saved = _accel.USE_NUMBA
    print(f"grid {args.n}x{args.n}, best of {args.repeat}")
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}{'max |diff|':>13}")
    try:
        for name, fn in cases(args.n).items():
            _accel.USE_NUMBA = False
            t_np, out_np = best_of(fn, args.repeat), fn()
            _accel.USE_NUMBA = True
            t_nb, out_nb = best_of(fn, args.repeat), fn()
            print(f"{name:<18}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.2f}"
                  f"{max_diff(out_np, out_nb):>13.2e}")
        if args.solve:
            from vortexlab.vortex import default_params, solve_vortex
            cfg = ZeroConfig(((0j, 2),))
            for flag in (False, True):
                _accel.USE_NUMBA = flag
                t0 = time.perf_counter()
                sol = solve_vortex(cfg, default_params(cfg, grid_points_per_axis=512))
                dt = time.perf_counter() - t0
                print(f"solve 512 ({_accel.backend()}): {dt:.2f} s, E/pi = {sol.energy / np.pi:.6f}")
    finally:
        _accel.USE_NUMBA = saved


if __name__ == "__main__":
    main()
