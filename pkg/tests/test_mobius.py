import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexlab.errors import ValidationError
from vortexlab.mobius import Mobius, mobius_from_triples
from vortexlab.moduli import INF

coords = st.floats(-5, 5, allow_nan=False)
cpx = st.builds(complex, coords, coords)


def test_basic_maps():
    t = Mobius.translation(2 - 1j)
    assert t(1j) == 2 + 0j
    assert t(INF) is INF
    assert t.is_translation() and t.translation_vector() == 2 - 1j
    a = Mobius.affine(3, 1)
    assert a(2) == pytest.approx(7)
    inv = Mobius(0, 1, 1, 0)
    assert inv(0) is INF and inv(INF) == 0


def test_normalisation_is_deterministic():
    a = Mobius(2, 4, 0, 2)
    b = Mobius(-1, -2, 0, -1)
    assert a == b
    a0, _, _, d0 = a.coefficients
    assert abs(a0 * d0 - 1) < 1e-14


def test_degenerate_rejected():
    with pytest.raises(ValidationError):
        Mobius(1, 2, 2, 4)
    with pytest.raises(ValidationError):
        Mobius.affine(0, 1)


@given(cpx, cpx, cpx, cpx)
def test_composition_and_inverse(a, b, c, z):
    m = Mobius(1 + a, b, c, 1)
    if abs(np.linalg.det(m.m)) < 1e-9:
        return
    n = Mobius.affine(2, a)
    w = (m @ n)(z)
    v = m(n(z))
    if w is INF or v is INF:
        assert w is v or (w is not INF and abs(w) > 1e8) or (v is not INF and abs(v) > 1e8)
    else:
        assert abs(w - v) <= 1e-8 * (1 + abs(w))
    assert (m @ m.inverse()).is_identity(1e-9)


def test_three_point_map():
    src = [0j, 1 + 0j, INF]
    dst = [1j, 2 + 0j, -1 + 0j]
    m = mobius_from_triples(src, dst)
    for s, d in zip(src, dst):
        assert abs(m(s) - d) < 1e-12


def test_rotation_fixes_centre():
    r = Mobius.rotation(0.7, 1 + 1j)
    assert abs(r(1 + 1j) - (1 + 1j)) < 1e-14
    assert abs(r(2 + 1j) - (1 + 1j + cmath.exp(0.7j))) < 1e-14
    assert not r.is_translation()
