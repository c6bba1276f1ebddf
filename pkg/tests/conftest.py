import functools

import pytest
from hypothesis import HealthCheck, settings

from vortexlab.config import ZeroConfig
from vortexlab.vortex import default_params, solve_vortex

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def _solve(zeros, n, radius=None):
    cfg = ZeroConfig(zeros)
    over = {"grid_points_per_axis": n}
    if radius is not None:
        over["domain_radius"] = radius
    return solve_vortex(cfg, default_params(cfg, **over))


@pytest.fixture(scope="session")
def solve():
    """Cached solver: ``solve(((z, n), ...), grid[, radius])``."""
    return _solve
