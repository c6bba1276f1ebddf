import json

import pytest
from hypothesis import given, strategies as st

from vortexlab.config import SolverParams, ZeroConfig
from vortexlab.errors import DomainTooSmall, ValidationError

coords = st.floats(-50, 50, allow_nan=False)
points = st.builds(complex, coords, coords)


def test_canonical_order_and_degree():
    a = ZeroConfig(((1 + 1j, 2), (-1 + 0j, 1)))
    b = ZeroConfig(((-1 + 0j, 1), (1 + 1j, 2)))
    assert a == b
    assert a.degree == 3
    assert a.points() == [-1, 1 + 1j, 1 + 1j]


def test_empty_config():
    c = ZeroConfig()
    assert c.degree == 0 and len(c) == 0 and c.max_abs() == 0.0


@pytest.mark.parametrize("bad", [
    ((0j, 0),), ((0j, -1),), ((0j, 1.5),), ((complex("nan"), 1),), ((0j, 1), (0j, 2)), ((0j,),),
])
def test_invalid_configs(bad):
    with pytest.raises(ValidationError):
        ZeroConfig(bad)


def test_from_points_merges_duplicates():
    c = ZeroConfig.from_points([3 + 4j, -2 - 1j, 3 + 4j])
    assert c == ZeroConfig(((-2 - 1j, 1), (3 + 4j, 2)))


def test_json_format():
    c = ZeroConfig(((0.5 - 1j, 2),))
    data = c.to_json()
    assert data == {"zeros": [{"re": 0.5, "im": -1.0, "mult": 2}]}
    assert ZeroConfig.from_json(json.dumps(data)) == c
    with pytest.raises(ValidationError):
        ZeroConfig.from_json({"zeros": [{"re": 0}]})
    with pytest.raises(ValidationError):
        ZeroConfig.from_json({"points": []})


@given(st.lists(st.tuples(points, st.integers(1, 4)), max_size=6, unique_by=lambda e: e[0]))
def test_json_round_trip(entries):
    try:
        c = ZeroConfig(tuple(entries))
    except ValidationError:
        return
    assert ZeroConfig.from_json(c.to_json()) == c


@given(st.lists(points, min_size=1, max_size=6), points)
def test_translation_moves_centroid(pts, c):
    cfg = ZeroConfig.from_points(pts)
    moved = cfg.translate(c)
    assert abs(moved.centroid() - cfg.centroid() - c) <= 1e-9 * (1 + abs(c) + cfg.max_abs())


def test_solver_params_validation():
    with pytest.raises(ValidationError):
        SolverParams(grid_points_per_axis=8)
    with pytest.raises(ValidationError):
        SolverParams(damping=0.0)
    p = SolverParams(domain_radius=12, grid_points_per_axis=96)
    assert p.spacing == pytest.approx(0.25)
    assert SolverParams.from_json(p.to_json()) == p


def test_domain_margin():
    p = SolverParams(domain_radius=12)
    p.check_config(ZeroConfig(((4 + 0j, 1),)))
    with pytest.raises(DomainTooSmall):
        p.check_config(ZeroConfig(((4.5 + 0j, 1),)))
