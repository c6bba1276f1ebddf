"""Reference degenerating families used by the CLI, the tests and the benchmarks."""

from __future__ import annotations

import cmath

import numpy as np

from .bubbling import ConfigurationFamily, MobiusFamily
from .config import ZeroConfig
from .mobius import Mobius
from .moduli import INF
from .stable_maps import T1, TINF, BubbleTree

DEFAULT_SCALES = tuple(float(s) for s in range(10, 101, 10))


def stationary_family(config: ZeroConfig, scales=DEFAULT_SCALES) -> ConfigurationFamily:
    pts = config.points()
    return ConfigurationFamily(scales, [[p] * len(scales) for p in pts])


def stationary_tree(config: ZeroConfig) -> BubbleTree:
    return BubbleTree({0: T1}, vortex={0: config}, marked=[(0, INF)])


def identity_reparams(tree: BubbleTree, m: int) -> MobiusFamily:
    return MobiusFamily({v: [Mobius.identity()] * m for v in tree.types})


def splitting_family(scales=DEFAULT_SCALES) -> ConfigurationFamily:
    """Three zeros at (-2-i) and (3+4i) twice stay put; four zeros run off along nu*e^{i nu}."""
    tracks = [[-2 - 1j] * len(scales), [3 + 4j] * len(scales), [3 + 4j] * len(scales)]
    far = [s * cmath.exp(1j * s) for s in scales]
    tracks += [far] * 4
    return ConfigurationFamily(scales, tracks)


def splitting_tree() -> BubbleTree:
    """Ghost root with bubbles attached at 1 and 2, as the splitting family is usually drawn."""
    return BubbleTree(
        {0: TINF, 1: T1, 2: T1},
        edges=[(0, 1), (0, 2)],
        vortex={1: ZeroConfig(((-2 - 1j, 1), (3 + 4j, 2))), 2: ZeroConfig(((0j, 4),))},
        nodal={(1, 0): INF, (2, 0): INF, (0, 1): 1 + 0j, (0, 2): 2 + 0j},
        marked=[(0, INF)],
    )


def splitting_reparams(scales=DEFAULT_SCALES) -> MobiusFamily:
    """phi_1 = id, phi_2 = z + nu e^{i nu}, phi_0 = nu e^{i nu} (z - 1).

    With these, phi_0^{-1} phi_1(0) = 1 and phi_0^{-1} phi_2(0) = 2.
    """
    maps = {0: [], 1: [], 2: []}
    for s in scales:
        lam = s * cmath.exp(1j * s)
        maps[0].append(Mobius.affine(lam, -lam))
        maps[1].append(Mobius.identity())
        maps[2].append(Mobius.translation(lam))
    return MobiusFamily(maps)


def two_level_family(scales=DEFAULT_SCALES) -> ConfigurationFamily:
    """Zeros at 0, nu and nu + sqrt(nu): two nested ghost levels."""
    s = np.asarray(scales, dtype=float)
    return ConfigurationFamily(s, [np.zeros_like(s), s, s + np.sqrt(s)])
