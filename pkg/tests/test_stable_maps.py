import json

import numpy as np
import pytest

from vortexlab.config import ZeroConfig
from vortexlab.errors import IncompatibleType
from vortexlab.mobius import Mobius, mobius_from_triples
from vortexlab.moduli import INF
from vortexlab.stable_maps import (BubbleTree, ReparamElement, act, automorphisms, compose,
                                   identity_element, inverse, is_simple, rotate_config,
                                   translation_equivalent, validate)
from vortexlab.testing import matching_element, random_config, random_element, random_tree


def star(ell, configs=None, ghost_points=None):
    """Ghost sphere 0 with ell vortex vertices hanging off it."""
    configs = configs or [ZeroConfig(((0j, i),)) for i in range(1, ell + 1)]
    pts = ghost_points or [complex(i) for i in range(ell)]
    types = {0: "Tinf", **{i: "T1" for i in range(1, ell + 1)}}
    edges = [(0, i) for i in range(1, ell + 1)]
    nodal = {}
    for i in range(1, ell + 1):
        nodal[(i, 0)] = INF
        nodal[(0, i)] = pts[i - 1]
    return BubbleTree(types, edges, dict(zip(range(1, ell + 1), configs)), nodal, [(0, INF)])


def conditions(tree):
    return {v.condition for v in validate(tree)}


def test_four_bubble_example_is_valid():
    assert validate(star(4)) == []
    assert star(4).degree() == 10


def test_lonely_ghost_vortex_is_unstable():
    t = BubbleTree({0: "T1"}, vortex={0: ZeroConfig()}, marked=[(0, INF)])
    assert conditions(t) == {"Stability"}


def test_ghost_sphere_with_two_points_is_unstable():
    assert conditions(star(1)) == {"Stability"}


def test_other_violations():
    t = star(2)
    bad_edge = BubbleTree(t.types, t.edges | {(1, 2)}, t.vortex, t.nodal, t.marked)
    assert "Tree" in conditions(bad_edge)
    no_data = BubbleTree(t.types, t.edges, {1: t.vortex[1]}, t.nodal, t.marked)
    assert "Data" in conditions(no_data)
    nodal = dict(t.nodal)
    nodal[(1, 0)] = 0j
    assert "Special points" in conditions(BubbleTree(t.types, t.edges, t.vortex, nodal, t.marked))
    nodal = dict(t.nodal)
    nodal[(0, 2)] = nodal[(0, 1)]
    assert "Special points" in conditions(BubbleTree(t.types, t.edges, t.vortex, nodal, t.marked))
    root_t1 = BubbleTree(t.types, t.edges, t.vortex, t.nodal, [(1, INF)])
    assert "Combinatorics" in conditions(root_t1)
    t0_under_tinf = BubbleTree({0: "Tinf", 1: "T0", 2: "T1", 3: "T1"}, [(0, 1), (0, 2), (0, 3)],
                               {2: ZeroConfig(((0j, 1),)), 3: ZeroConfig(((0j, 2),))},
                               {(0, 1): 0j, (1, 0): 0j, (0, 2): 1 + 0j, (2, 0): INF,
                                (0, 3): 2 + 0j, (3, 0): INF}, [(0, INF), (1, 1 + 0j), (1, 2 + 0j)])
    assert "Combinatorics" in conditions(t0_under_tinf)


def test_json_roundtrip_is_exact():
    rng = np.random.default_rng(2)
    for _ in range(30):
        t = random_tree(rng)
        again = BubbleTree.from_json(json.loads(json.dumps(t.to_json())))
        assert again == t and again.dumps() == t.dumps()


def test_identity_action():
    t = star(3)
    assert act(identity_element(t), t) == t


def test_translation_on_vortex_vertex():
    c = 1.5 - 2j
    t = BubbleTree({0: "T1"}, vortex={0: ZeroConfig(((0j, 2),))}, marked=[(0, INF), (0, 1 + 1j)])
    g = ReparamElement({0: 0}, {0: Mobius.translation(c)})
    out = act(g, t)
    assert out.vortex[0].isclose(ZeroConfig(((-c, 2),)), 1e-12)
    assert out.marked[0][1] is INF
    assert out.marked[1][1] == pytest.approx(1 + 1j - c)


def test_map_fixing_three_points_acts_trivially():
    t = star(3)
    pts = [t.nodal[(0, i)] for i in (1, 2, 3)]
    phi = mobius_from_triples(pts, pts)
    assert phi.is_identity(1e-12)
    g = ReparamElement({v: v for v in t.types}, {**{v: Mobius.identity() for v in t.types}, 0: phi})
    assert act(g, t).isclose(t)


def test_incompatible_elements():
    t = star(2)
    with pytest.raises(IncompatibleType):
        act(ReparamElement({0: 1, 1: 0, 2: 2}, {v: Mobius.identity() for v in t.types}), t)
    with pytest.raises(IncompatibleType):
        # swapping vertices of different energy
        act(ReparamElement({0: 0, 1: 2, 2: 1}, {v: Mobius.identity() for v in t.types}), t)
    with pytest.raises(IncompatibleType):
        maps = {v: Mobius.identity() for v in t.types}
        maps[1] = Mobius.affine(2, 0)
        act(ReparamElement({v: v for v in t.types}, maps), t)


def test_automorphisms_respect_energy():
    same = star(3, [ZeroConfig(((0j, 1),))] * 2 + [ZeroConfig(((0j, 2),))])
    assert len(automorphisms(same)) == 2
    assert len(automorphisms(star(3))) == 1


@pytest.mark.parametrize("a,b,simple", [
    ({(0, 1)}, {(5, 1)}, False),
    ({(0, 1)}, {(0, 2)}, True),
    ({(0, 1), (1, 1)}, {(0, 1), (2, 1)}, True),
])
def test_is_simple_examples(a, b, simple):
    cfgs = [ZeroConfig(tuple((complex(p), n) for p, n in sorted(s))) for s in (a, b)]
    assert is_simple(star(2, cfgs)) is simple


def test_translation_equivalence_by_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = random_config(rng)
        pts = a.points()
        b = random_config(rng) if rng.random() < 0.5 else a.translate(complex(*rng.normal(size=2)))
        q = b.points()
        brute = len(pts) == len(q) and any(
            sorted(np.round(np.array(pts) + (y - pts[0]), 7).tolist(), key=lambda z: (z.real, z.imag))
            == sorted(np.round(np.array(q), 7).tolist(), key=lambda z: (z.real, z.imag))
            for y in q)
        assert translation_equivalent(a, b) == brute


def test_group_law_and_inverse():
    rng = np.random.default_rng(8)
    for _ in range(40):
        t = random_tree(rng, simple=False)
        g, h = random_element(rng, t), random_element(rng, t)
        lhs = act(compose(g, h), t)
        rhs = act(h, act(g, t))
        assert lhs.isclose(rhs, 1e-7)
        assert act(inverse(g), act(g, t)).isclose(t, 1e-7)


def test_action_preserves_validity():
    rng = np.random.default_rng(9)
    for _ in range(60):
        t = random_tree(rng, simple=False)
        assert validate(act(random_element(rng, t), t)) == []


def test_free_on_simple_trees():
    rng = np.random.default_rng(10)
    for _ in range(60):
        t = random_tree(rng)
        g = matching_element(rng, t)
        if g.is_identity():
            continue
        assert not act(g, t).isclose(t)


def test_rotation_fixes_point_of_full_multiplicity():
    cfg = ZeroConfig(((0j, 3),))
    for angle in (0.3, 1.0, 2.5):
        assert rotate_config(cfg, angle).isclose(cfg, 1e-12)
    off = ZeroConfig(((1 + 0j, 1),))
    assert not rotate_config(off, 1.0).isclose(off, 1e-6)
