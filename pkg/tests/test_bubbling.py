import json

import numpy as np
import pytest

from vortexlab.bubbling import (ConfigurationFamily, MobiusFamily, check_convergence,
                                extract_bubble_tree, pair_exponents, sphere_net)
from vortexlab.config import ZeroConfig
from vortexlab.errors import AmbiguousExponents, ValidationError
from vortexlab.families import (DEFAULT_SCALES, identity_reparams, splitting_family, splitting_reparams,
                                splitting_tree, stationary_family, stationary_tree, two_level_family)
from vortexlab.moduli import INF
from vortexlab.stable_maps import BubbleTree, validate

NU = np.array(DEFAULT_SCALES)


def degrees(tree):
    return sorted(tree.vortex[v].degree for v in tree.T1)


def test_family_validation_and_json():
    with pytest.raises(ValidationError):
        ConfigurationFamily([1, 1, 2], [[0, 0, 0]])
    with pytest.raises(ValidationError):
        ConfigurationFamily([1, 2, 3], [[0, 0]])
    fam = splitting_family()
    again = ConfigurationFamily.from_json(json.loads(json.dumps(fam.to_json())))
    assert np.array_equal(again.tracks, fam.tracks) and np.array_equal(again.scales, fam.scales)
    assert fam.config_at(0).degree == 7


def test_pair_exponents_recover_power_laws():
    pts = np.array([0 * NU, NU, NU + np.sqrt(NU)])
    exp, err = pair_exponents(pts, NU)
    assert exp[(0, 1)] == pytest.approx(1.0, abs=1e-9)
    assert exp[(1, 2)] == pytest.approx(0.5, abs=1e-9)
    assert max(err.values()) < 0.05


def test_stationary_family():
    cfg = ZeroConfig(((1 + 1j, 2), (-3 + 0j, 1)))
    fam = stationary_family(cfg)
    tree, reps, report = extract_bubble_tree(fam)
    assert tree.types == {0: "T1"} and tree.marked == ((0, INF),)
    assert tree.vortex[0].isclose(cfg, 1e-12)
    conv = check_convergence(fam, stationary_tree(cfg), identity_reparams(stationary_tree(cfg), fam.m))
    assert conv.passed
    assert all(max(c.residuals) == 0 for c in conv.conditions.values())


def test_splitting_family_tree():
    tree, reps, report = extract_bubble_tree(splitting_family())
    assert validate(tree) == []
    assert tree.T0 == [] and len(tree.Tinf) == 1 and len(tree.T1) == 2
    assert degrees(tree) == [3, 4]
    root = tree.root
    assert tree.types[root] == "Tinf" and tree.marked[0] == (root, INF)
    for v in tree.T1:
        assert tree.nodal[(v, root)] is INF
    assert check_convergence(splitting_family(), tree, reps).passed


def test_splitting_family_with_explicit_maps():
    report = check_convergence(splitting_family(), splitting_tree(), splitting_reparams())
    assert report.passed, report.text()
    assert report.induced_nodal[(0, 1)] == pytest.approx(1, abs=1e-2)
    assert report.induced_nodal[(0, 2)] == pytest.approx(2, abs=1e-2)


def test_wrong_degrees_fail():
    good = splitting_tree()
    vortex = {1: ZeroConfig(((0j, 2),)), 2: ZeroConfig(((0j, 5),))}
    bad = BubbleTree(good.types, good.edges, vortex, good.nodal, good.marked)
    report = check_convergence(splitting_family(), bad, splitting_reparams())
    assert not report.passed and "degree" in report.failing()


def test_two_level_family():
    fam = two_level_family()
    tree, reps, report = extract_bubble_tree(fam)
    assert validate(tree) == []
    assert len(tree.T1) == 3 and len(tree.Tinf) == 2
    assert degrees(tree) == [1, 1, 1]
    assert check_convergence(fam, tree, reps).passed


def test_wrong_nodal_point_fails():
    fam = splitting_family()
    tree, reps, _ = extract_bubble_tree(fam)
    nodal = dict(tree.nodal)
    v = tree.T1[0]
    nodal[(tree.root, v)] = nodal[(tree.root, v)] + 0.5
    bad = BubbleTree(tree.types, tree.edges, tree.vortex, nodal, tree.marked)
    assert not check_convergence(fam, bad, reps).passed


def test_too_few_scales():
    fam = ConfigurationFamily([1, 2, 3], [[0, 0, 0], [1, 2, 3]])
    with pytest.raises(AmbiguousExponents):
        extract_bubble_tree(fam)


def test_unresolved_exponents():
    # exponents 1, 0.8 and 0.6 chain into one level that is too wide to trust
    s = np.array([10.0, 20.0, 40.0, 80.0])
    fam = ConfigurationFamily(s, [0 * s, s, s + s ** 0.8, s + 1j * s ** 0.6])
    with pytest.raises(AmbiguousExponents):
        extract_bubble_tree(fam)


def test_marked_tracks():
    fam0 = splitting_family()
    marks = [np.full(NU.size, 5 + 5j), NU * np.exp(1j * NU) + 0.5]
    fam = ConfigurationFamily(fam0.scales, fam0.tracks, marks)
    tree, reps, _ = extract_bubble_tree(fam)
    assert validate(tree) == []
    assert len(tree.marked) == 3
    assert check_convergence(fam, tree, reps).passed


def test_degree_conservation_and_roundtrip_random():
    rng = np.random.default_rng(21)
    for _ in range(25):
        k = int(rng.integers(1, 4))
        centres = [complex(*rng.normal(0, 3, 2)) for _ in range(k)]
        speeds = rng.choice([0.0, 1.0], size=k)
        tracks = []
        for c, s in zip(centres, speeds):
            dirn = np.exp(1j * rng.uniform(0, 2 * np.pi))
            for _ in range(int(rng.integers(1, 3))):
                tracks.append(c + s * dirn * NU + complex(*rng.normal(0, 1, 2)))
        fam = ConfigurationFamily(NU, tracks)
        try:
            tree, reps, _ = extract_bubble_tree(fam)
        except AmbiguousExponents:
            continue
        assert sum(degrees(tree)) == fam.d
        assert check_convergence(fam, tree, reps).passed


def test_translation_covariance():
    fam = two_level_family()
    c = 3 - 2j
    t1, _, _ = extract_bubble_tree(fam)
    t2, _, _ = extract_bubble_tree(fam.translate(c))
    assert t1.types == t2.types and t1.edges == t2.edges
    for v in t1.T1:
        a, b = t1.vortex[v], t2.vortex[v]
        assert a.degree == b.degree
    assert t1.isclose(t2, 1e-6) or all(
        t1.vortex[v].translate(c).isclose(t2.vortex[v], 1e-6) or t1.vortex[v].isclose(t2.vortex[v], 1e-6)
        for v in t1.T1)


def test_reparams_json():
    reps = splitting_reparams()
    again = MobiusFamily.from_json(json.loads(json.dumps(reps.to_json())))
    assert set(again.maps) == set(reps.maps)
    assert all(a == b for v in reps.maps for a, b in zip(reps[v], again[v]))


def test_sphere_net_contains_poles():
    net = sphere_net(100)
    assert len(net) == 102 and INF in net and 0j in net
