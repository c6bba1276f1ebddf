"""Random generators for property suites (valid trees, group elements, configurations)."""

from __future__ import annotations

import numpy as np

from .config import ZeroConfig
from .mobius import Mobius, mobius_from_triples
from .moduli import INF, SymPoint
from .stable_maps import (T0, T1, TINF, BubbleTree, ReparamElement, automorphisms,
                          is_simple, validate)


def _point(rng, scale=3.0):
    return complex(*np.round(rng.normal(0.0, scale, 2), 6))


def _distinct(rng, k, avoid=()):
    pts = []
    while len(pts) < k:
        p = _point(rng)
        if all(abs(p - q) > 1e-3 for q in list(pts) + [a for a in avoid if a is not INF]):
            pts.append(p)
    return pts


def random_config(rng, max_degree: int = 4, allow_empty: bool = False) -> ZeroConfig:
    d = int(rng.integers(0 if allow_empty else 1, max_degree + 1))
    if d == 0:
        return ZeroConfig()
    n_pts = int(rng.integers(1, d + 1))
    pts = _distinct(rng, n_pts)
    mult = [1] * n_pts
    for _ in range(d - n_pts):
        mult[int(rng.integers(n_pts))] += 1
    return ZeroConfig(tuple(zip(pts, mult)))


def random_sym_point(rng, size: int, inf_prob: float = 0.2) -> SymPoint:
    pts = []
    for _ in range(size):
        pts.append(INF if rng.random() < inf_prob else _point(rng, 2.0))
    return SymPoint(pts)


def random_tree(rng, max_depth: int = 3, max_children: int = 3, simple: bool = True,
                max_tries: int = 100) -> BubbleTree:
    """A random valid stable map (simple unless asked otherwise)."""
    for _ in range(max_tries):
        tree = _random_tree(rng, max_depth, max_children)
        if not validate(tree) and (not simple or is_simple(tree)):
            return tree
    raise RuntimeError("could not draw a valid tree")  # pragma: no cover


def _random_tree(rng, max_depth, max_children):
    types, edges, vortex, nodal = {}, [], {}, {}
    marks = []
    counter = [0]

    def new(t):
        v = counter[0]
        counter[0] += 1
        types[v] = t
        return v

    def grow(v, depth, parent):
        t = types[v]
        kids = []
        if depth < max_depth:
            n = int(rng.integers(0, max_children + 1))
            for _ in range(n):
                if t == TINF:
                    kids.append(T1 if rng.random() < 0.6 else TINF)
                else:  # T1 and T0 carry T0 children only
                    if rng.random() < 0.5:
                        kids.append(T0)
        if t == T1:
            vortex[v] = random_config(rng, 3, allow_empty=True)
        # special points on v: towards parent, towards children, marks
        own = []
        if parent is not None:
            if t == T1:
                up = INF
            else:
                up = INF if rng.random() < 0.5 else _point(rng)
            nodal[(v, parent)] = up
            own.append(up)
        if parent is None:
            z0 = INF if t == T1 or rng.random() < 0.5 else _point(rng)
            marks.insert(0, (v, z0))
            own.append(z0)
        children = [new(k) for k in kids]
        for c in children:
            edges.append((v, c))
            (p,) = _distinct(rng, 1, own)
            nodal[(v, c)] = p
            own.append(p)
        need = 3 if t in (T0, TINF) else (2 if vortex[v].degree == 0 else 0)
        extra = max(0, need - len(own)) + int(rng.integers(0, 2))
        for p in _distinct(rng, extra, own):
            marks.append((v, p))
            own.append(p)
        for c in children:
            grow(c, depth + 1, v)

    root = new(T1 if rng.random() < 0.4 else TINF)
    grow(root, 0, None)
    return BubbleTree(types, edges, vortex, nodal, marks)


def random_mobius(rng, scale: float = 1.0) -> Mobius:
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        m = np.eye(2) + scale * m
        if abs(np.linalg.det(m)) > 1e-3:
            return Mobius(m)


def random_element(rng, tree: BubbleTree, scale: float = 1.0) -> ReparamElement:
    """Random automorphism with random per-vertex maps (translations on T1)."""
    autos = automorphisms(tree)
    f = autos[int(rng.integers(len(autos)))]
    maps = {}
    for v, t in tree.types.items():
        if t == T1:
            maps[v] = Mobius.translation(scale * _point(rng, 1.0))
        else:
            maps[v] = random_mobius(rng, scale)
    return ReparamElement(f, maps)


def matching_element(rng, tree: BubbleTree, perturb: float = 1e-6) -> ReparamElement:
    """Element built to come as close as possible to fixing ``tree``.

    Uses a random automorphism and per-vertex maps carrying special points
    (or centroids on T1) of ``a`` onto those of ``f(a)``; a small perturbation
    keeps it away from the identity when the automorphism is trivial.
    """
    autos = automorphisms(tree)
    nontrivial = [a for a in autos if any(k != v for k, v in a.items())]
    f = nontrivial[int(rng.integers(len(nontrivial)))] if nontrivial else autos[0]
    maps = {}
    for a, t in tree.types.items():
        fa = f[a]
        src = [tree.nodal[(a, b)] for b in tree.neighbours(a)] + [z for v, z in tree.marked if v == a]
        dst = [tree.nodal[(fa, f[b])] for b in tree.neighbours(a)] + [z for v, z in tree.marked if v == fa]
        if t == T1:
            cfg_a, cfg_b = tree.vortex[a], tree.vortex[fa]
            if cfg_a.degree:
                shift = cfg_b.centroid() - cfg_a.centroid()
            else:
                finite = [(p, q) for p, q in zip(src, dst) if p is not INF and q is not INF]
                shift = finite[0][1] - finite[0][0] if finite else 0
            m = Mobius.translation(shift)
        elif len(src) >= 3 and len(dst) >= 3:
            m = mobius_from_triples(src[:3], dst[:3])
        else:  # pragma: no cover - stability gives three special points
            m = Mobius.identity()
        if all(k == v for k, v in f.items()):
            m = m @ (Mobius.translation(perturb) if t == T1 else Mobius(1 + perturb, perturb, 0, 1))
        maps[fa] = m
    return ReparamElement(f, maps)
