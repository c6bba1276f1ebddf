import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexlab.config import ZeroConfig
from vortexlab.errors import DegreeExceeded, SizeMismatch, ValidationError
from vortexlab.moduli import (INF, SymPoint, as_sphere_point, boundary_margin, brute_force_distance,
                              chordal, in_subbasis_set, iota, sym_distance)

coords = st.floats(-20, 20, allow_nan=False)
sphere = st.one_of(st.just(INF), st.builds(complex, coords, coords))


def test_infinity_singleton():
    assert as_sphere_point("inf") is INF
    with pytest.raises(ValidationError):
        as_sphere_point(complex("inf"))
    assert chordal(INF, INF) == 0.0
    assert chordal(0, INF) == 2.0


@pytest.mark.parametrize("nu", [1.0, 10.0, 100.0])
def test_chordal_to_infinity(nu):
    z = nu * complex(math.cos(nu), math.sin(nu))
    d = sym_distance(SymPoint([z]), SymPoint([INF]))
    assert d == pytest.approx(2 / math.sqrt(1 + nu * nu), rel=1e-12)


def test_iota_examples():
    assert iota(ZeroConfig(), 2) == SymPoint([INF, INF])
    assert iota(ZeroConfig(((1 + 0j, 1), (2 + 0j, 1))), 2) == SymPoint([1, 2])
    assert iota(ZeroConfig(((0j, 3),)), 7) == SymPoint([0, 0, 0, INF, INF, INF, INF])
    with pytest.raises(DegreeExceeded):
        iota(ZeroConfig(((0j, 3),)), 2)


def test_sym_point_json():
    s = SymPoint([1 - 1j, INF, 0])
    assert s.to_json()["d"] == 3
    assert SymPoint.from_json(s.to_json()) == s
    assert s.count_inf() == 1


def test_size_mismatch():
    with pytest.raises(SizeMismatch):
        sym_distance(SymPoint([0]), SymPoint([0, 1]))


def test_equal_multisets():
    assert sym_distance(SymPoint([1, 2]), SymPoint([2, 1])) == 0.0


@given(st.lists(sphere, min_size=4, max_size=4), st.lists(sphere, min_size=4, max_size=4))
def test_matching_equals_brute_force(a, b):
    A, B = SymPoint(a), SymPoint(b)
    best = min(math.fsum(chordal(x, y) for x, y in zip(A, perm))
               for perm in itertools.permutations(list(B)))
    assert sym_distance(A, B) == pytest.approx(best, abs=1e-12)
    assert brute_force_distance(A, B) == pytest.approx(best, abs=1e-12)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(*[st.lists(sphere, min_size=n, max_size=n)] * 3)))
def test_metric_axioms(triple):
    a, b, c = map(SymPoint, triple)
    assert sym_distance(a, a) == 0.0
    assert sym_distance(a, b) == pytest.approx(sym_distance(b, a), abs=1e-12)
    assert sym_distance(a, b) <= sym_distance(a, c) + sym_distance(c, b) + 1e-12


def test_subbasis_sets():
    m = SymPoint([0.1, 0.2j, 5])
    assert in_subbasis_set(m, 0, 1.0, 2)
    assert not in_subbasis_set(m, 0, 1.0, 3)
    assert boundary_margin(m, 0, 1.0) > 0
