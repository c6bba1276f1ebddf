"""Bubble trees (genus-0 stable maps) in the abelian plane model.

A vertex has one of three types:

* ``T1``   a vortex class over C, stored as its :class:`ZeroConfig`
  (energy = pi * degree);
* ``Tinf`` a sphere in the symplectic quotient, which is a point here, so
  every such sphere is a constant ghost;
* ``T0``   a ghost sphere used to separate colliding marked points in C.

Nodal points are stored per directed edge: ``nodal[(a, b)]`` is the point on
vertex ``a`` where ``b`` is attached.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .config import ZeroConfig
from .errors import IncompatibleType, ValidationError
from .mobius import Mobius
from .moduli import INF, as_sphere_point, chordal

__all__ = [
    "T0", "T1", "TINF", "BubbleTree", "Violation", "validate", "is_simple",
    "ReparamElement", "act", "compose", "inverse", "identity_element",
    "automorphisms", "translation_equivalent", "rotate_config", "pull_back_config",
    "vertex_energy",
]

T0, T1, TINF = "T0", "T1", "Tinf"
TYPES = (T0, T1, TINF)
POINT_TOL = 1e-12


def _pt_json(z):
    return "inf" if z is INF else {"re": z.real, "im": z.imag}


def _pt_from_json(x):
    return INF if isinstance(x, str) else complex(x["re"], x["im"])


def _pt_close(a, b, tol):
    if a is INF or b is INF:
        return a is b
    return abs(a - b) <= tol


class BubbleTree:
    """Immutable bubble tree.

    Parameters
    ----------
    types : mapping vertex -> "T0" | "T1" | "Tinf"
    edges : iterable of unordered vertex pairs
    vortex : mapping T1 vertex -> ZeroConfig
    nodal : mapping (a, b) -> sphere point, for both orientations of each edge
    marked : sequence of (vertex, sphere point); entry 0 is (alpha_0, z_0)
    """

    __slots__ = ("types", "edges", "vortex", "nodal", "marked", "_adj")

    def __init__(self, types, edges=(), vortex=None, nodal=None, marked=()):
        types = dict(types)
        for v, t in types.items():
            if t not in TYPES:
                raise ValidationError(f"vertex {v!r} has unknown type {t!r}")
        es = set()
        for a, b in edges:
            es.add((a, b) if _sortkey(a) <= _sortkey(b) else (b, a))
        vortex = {v: (c if isinstance(c, ZeroConfig) else ZeroConfig(c))
                  for v, c in (vortex or {}).items()}
        nodal = {tuple(k): as_sphere_point(z) for k, z in (nodal or {}).items()}
        marked = tuple((v, as_sphere_point(z)) for v, z in marked)
        adj = {v: [] for v in types}
        for a, b in sorted(es, key=lambda e: (_sortkey(e[0]), _sortkey(e[1]))):
            if a in adj:
                adj[a].append(b)
            if b in adj:
                adj[b].append(a)
        for name, value in (("types", types), ("edges", frozenset(es)), ("vortex", vortex),
                            ("nodal", nodal), ("marked", marked), ("_adj", adj)):
            object.__setattr__(self, name, value)

    def __setattr__(self, name, value):
        raise AttributeError("BubbleTree is immutable")

    # -- structure --------------------------------------------------------
    @property
    def vertices(self):
        return sorted(self.types, key=_sortkey)

    def of_type(self, t):
        return sorted((v for v, tv in self.types.items() if tv == t), key=_sortkey)

    @property
    def T0(self):
        return self.of_type(T0)

    @property
    def T1(self):
        return self.of_type(T1)

    @property
    def Tinf(self):
        return self.of_type(TINF)

    @property
    def root(self):
        return self.marked[0][0] if self.marked else None

    def neighbours(self, v):
        return list(self._adj.get(v, ()))

    def directed_edges(self):
        out = []
        for a, b in self.edges:
            out += [(a, b), (b, a)]
        return sorted(out, key=lambda e: (_sortkey(e[0]), _sortkey(e[1])))

    def parent_map(self):
        """Parent of each vertex on the path to the root (BFS from the root)."""
        root = self.root
        if root not in self.types:
            return {}
        parent = {root: None}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in self._adj[v]:
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        return parent

    def special_points(self, v):
        pts = [self.nodal.get((v, w)) for w in self._adj[v]]
        pts += [z for a, z in self.marked if a == v]
        return pts

    def degree(self) -> int:
        return sum(self.vortex[v].degree for v in self.T1 if v in self.vortex)

    def energy(self) -> float:
        return math.pi * self.degree()

    # -- comparison -------------------------------------------------------
    def isclose(self, other: "BubbleTree", tol: float = 1e-9) -> bool:
        if self.types != other.types or self.edges != other.edges:
            return False
        if set(self.vortex) != set(other.vortex):
            return False
        if any(not self.vortex[v].isclose(other.vortex[v], tol) for v in self.vortex):
            return False
        if set(self.nodal) != set(other.nodal):
            return False
        if any(not _pt_close(self.nodal[k], other.nodal[k], tol) for k in self.nodal):
            return False
        if len(self.marked) != len(other.marked):
            return False
        return all(a == b and _pt_close(z, w, tol)
                   for (a, z), (b, w) in zip(self.marked, other.marked))

    def __eq__(self, other):
        return isinstance(other, BubbleTree) and self.isclose(other, 0.0)

    __hash__ = None

    def __repr__(self):
        parts = []
        for v in self.vertices:
            t = self.types[v]
            extra = f" {self.vortex[v]!r}" if t == T1 and v in self.vortex else ""
            parts.append(f"{v}:{t}{extra}")
        return f"BubbleTree([{', '.join(parts)}], edges={sorted(self.edges, key=repr)}, marked={list(self.marked)})"

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            entry = {"id": v, "type": self.types[v]}
            if self.types[v] == T1 and v in self.vortex:
                entry["zeros"] = self.vortex[v].to_json()["zeros"]
            verts.append(entry)
        return {
            "vertices": verts,
            "edges": [[a, b] for a, b in sorted(self.edges, key=lambda e: (_sortkey(e[0]), _sortkey(e[1])))],
            "nodal": [{"from": a, "to": b, "z": _pt_json(self.nodal[(a, b)])}
                      for a, b in self.directed_edges() if (a, b) in self.nodal],
            "marked": [{"vertex": v, "z": _pt_json(z)} for v, z in self.marked],
        }

    @classmethod
    def from_json(cls, data) -> "BubbleTree":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            types = {v["id"]: v["type"] for v in data["vertices"]}
            vortex = {v["id"]: ZeroConfig.from_json({"zeros": v.get("zeros", [])})
                      for v in data["vertices"] if v["type"] == T1}
            edges = [tuple(e) for e in data.get("edges", [])]
            nodal = {(n["from"], n["to"]): _pt_from_json(n["z"]) for n in data.get("nodal", [])}
            marked = [(m["vertex"], _pt_from_json(m["z"])) for m in data.get("marked", [])]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed bubble tree JSON: {exc}") from None
        return cls(types, edges, vortex, nodal, marked)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _sortkey(v):
    return (0, v, "") if isinstance(v, (int, float)) else (1, 0, str(v))


def vertex_energy(tree: BubbleTree, v) -> float:
    if tree.types[v] == T1:
        return math.pi * tree.vortex.get(v, ZeroConfig()).degree
    return 0.0


# -- validation ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    condition: str
    vertex: object
    message: str

    def __str__(self):
        return f"[{self.condition}] vertex {self.vertex!r}: {self.message}"


def validate(tree: BubbleTree) -> list:
    """All violations of the stable-map conditions (empty list when valid)."""
    out = []
    V = set(tree.types)

    def bad(cond, v, msg):
        out.append(Violation(cond, v, msg))

    # tree relation
    if not V:
        bad("Tree", None, "no vertices")
        return out
    for a, b in tree.edges:
        if a == b:
            bad("Tree", a, "edge relation must be anti-reflexive")
        if a not in V or b not in V:
            bad("Tree", a if a not in V else b, "edge references an unknown vertex")
    if out:
        return out
    if len(tree.edges) != len(V) - 1:
        bad("Tree", None, f"{len(tree.edges)} edges for {len(V)} vertices; not a tree")
    seen = {tree.vertices[0]}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in tree.neighbours(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if seen != V:
        bad("Tree", sorted(V - seen, key=_sortkey)[0], "vertex not connected to the rest")
    if out:
        return out

    # vertex data
    for v in tree.T1:
        if v not in tree.vortex:
            bad("Data", v, "T1 vertex without a zero configuration")
    for v in tree.vortex:
        if tree.types.get(v) != T1:
            bad("Data", v, "vortex data on a vertex that is not of type T1")
    for a, b in tree.directed_edges():
        if (a, b) not in tree.nodal:
            bad("Special points", a, f"missing nodal point z_({a},{b})")
    for (a, b) in tree.nodal:
        if (a, b) not in set(tree.directed_edges()):
            bad("Special points", a, f"nodal point given for non-edge ({a},{b})")
    for v, _ in tree.marked:
        if v not in V:
            bad("Special points", v, "marked point on an unknown vertex")
    if out:
        return out

    # combinatorics
    if not tree.marked:
        bad("Combinatorics", None, "marked point z_0 is missing")
        return out
    root = tree.root
    if tree.types[root] not in (T1, TINF):
        bad("Combinatorics", root, "alpha_0 must be of type T1 or Tinf")
    parent = tree.parent_map()
    for v, p in parent.items():
        if p is None:
            continue
        tv, tp = tree.types[v], tree.types[p]
        if tv == T0 and tp not in (T0, T1):
            bad("Combinatorics", v, f"T0 vertex attached towards the root to a {tp} vertex")
        if tv in (T1, TINF) and tp != TINF:
            bad("Combinatorics", v, f"{tv} vertex attached towards the root to a {tp} vertex")

    # special points
    if tree.types[root] == T1 and tree.marked[0][1] is not INF:
        bad("Special points", root, "z_0 must be infinity when alpha_0 is of type T1")
    for a, b in tree.directed_edges():
        if tree.types[a] == T1 and tree.types[b] == TINF and tree.nodal[(a, b)] is not INF:
            bad("Special points", a, f"nodal point towards Tinf vertex {b} must be infinity")
    for i, (v, z) in enumerate(tree.marked):
        if i > 0 and tree.types[v] == T1 and z is INF:
            bad("Special points", v, f"marked point z_{i} on a T1 vertex must lie in C")
    for v in tree.vertices:
        pts = tree.special_points(v)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if _pt_close(pts[i], pts[j], POINT_TOL):
                    bad("Special points", v, f"special points coincide at {pts[i]!r}")
                    break
            else:
                continue
            break

    # connectedness: the quotient is a point, so the evaluation condition always holds

    # stability
    for v in tree.vertices:
        n_special = len(tree.neighbours(v)) + sum(1 for a, _ in tree.marked if a == v)
        t = tree.types[v]
        if t == T1 and tree.vortex[v].degree == 0 and n_special < 2:
            bad("Stability", v, f"ghost vortex carries {n_special} special point(s), needs 2")
        if t in (T0, TINF) and n_special < 3:
            bad("Stability", v, f"ghost sphere carries {n_special} special point(s), needs 3")
    return out


# -- simplicity ----------------------------------------------------------------

def translation_equivalent(a: ZeroConfig, b: ZeroConfig, tol: float = 1e-9) -> bool:
    """True iff ``b`` is a translate of ``a``."""
    if a.degree != b.degree or sorted(a.multiplicities) != sorted(b.multiplicities):
        return False
    if a.degree == 0:
        return True
    return a.translate(-a.centroid()).isclose(b.translate(-b.centroid()), tol)


def is_simple(tree: BubbleTree, tol: float = 1e-9) -> bool:
    """No two distinct positive-energy T1 vertices carry translation-equivalent data."""
    vs = [v for v in tree.T1 if tree.vortex[v].degree > 0]
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            if translation_equivalent(tree.vortex[a], tree.vortex[b], tol):
                return False
    return True


# -- reparametrisation group ---------------------------------------------------

def pull_back_config(phi: Mobius, config: ZeroConfig) -> ZeroConfig:
    """Zeros of the pulled-back class: ``phi^{-1}`` of the old zeros."""
    inv = phi.inverse()
    return ZeroConfig(tuple((inv(p), n) for p, n in config.zeros))


def rotate_config(config: ZeroConfig, angle: float, centre=0) -> ZeroConfig:
    """Pull back by the rotation about ``centre`` (a symmetry outside the translation group)."""
    return pull_back_config(Mobius.rotation(angle, centre), config)


class ReparamElement:
    """Pair ``(f, (phi_alpha))``: a typed tree automorphism and per-vertex Möbius maps."""

    __slots__ = ("f", "maps")

    def __init__(self, f, maps):
        object.__setattr__(self, "f", dict(f))
        object.__setattr__(self, "maps", dict(maps))

    def __setattr__(self, name, value):
        raise AttributeError("ReparamElement is immutable")

    def f_inv(self):
        return {b: a for a, b in self.f.items()}

    def is_identity(self, tol: float = 1e-12) -> bool:
        return all(a == b for a, b in self.f.items()) and all(
            m.is_identity(tol) for m in self.maps.values())

    def check(self, tree: BubbleTree) -> None:
        V = set(tree.types)
        if set(self.f) != V or set(self.f.values()) != V:
            raise IncompatibleType("automorphism is not a bijection of the tree's vertices")
        if set(self.maps) != V:
            raise IncompatibleType("need one Möbius map per vertex")
        for v, w in self.f.items():
            if tree.types[v] != tree.types[w]:
                raise IncompatibleType(f"automorphism maps {v} ({tree.types[v]}) to {w} ({tree.types[w]})")
            if vertex_energy(tree, v) != vertex_energy(tree, w):
                raise IncompatibleType(f"automorphism maps {v} to {w} of different energy")
        for a, b in tree.edges:
            fa, fb = self.f[a], self.f[b]
            if ((fa, fb) if _sortkey(fa) <= _sortkey(fb) else (fb, fa)) not in tree.edges:
                raise IncompatibleType(f"automorphism does not preserve edge ({a},{b})")
        for v in tree.T1:
            if not self.maps[v].is_translation(1e-12):
                raise IncompatibleType(f"map on T1 vertex {v} is not a translation")

    def __repr__(self):
        return f"ReparamElement(f={self.f}, maps={self.maps})"


def identity_element(tree: BubbleTree) -> ReparamElement:
    return ReparamElement({v: v for v in tree.types}, {v: Mobius.identity() for v in tree.types})


def act(g: ReparamElement, tree: BubbleTree) -> BubbleTree:
    """Pull back ``tree`` by ``g``.

    The new vertex ``a`` takes the data of the old vertex ``f(a)``
    reparametrised by ``phi_{f(a)}``; a marked point on the old vertex
    ``alpha_i`` moves to ``f^{-1}(alpha_i)``. With this convention
    ``act(compose(g, h), t) == act(h, act(g, t))``.
    """
    g.check(tree)
    f, phi = g.f, g.maps
    finv = g.f_inv()
    vortex = {a: pull_back_config(phi[f[a]], tree.vortex[f[a]]) for a in tree.T1}
    nodal = {(a, b): phi[f[a]].inverse()(tree.nodal[(f[a], f[b])]) for a, b in tree.directed_edges()}
    marked = [(finv[v], phi[v].inverse()(z)) for v, z in tree.marked]
    return BubbleTree(tree.types, tree.edges, vortex, nodal, marked)


def compose(g: ReparamElement, h: ReparamElement) -> ReparamElement:
    """Group product ``g h`` with ``act(g h, t) = act(h, act(g, t))``."""
    f = {v: g.f[h.f[v]] for v in h.f}
    finv = g.f_inv()
    maps = {c: g.maps[c] @ h.maps[finv[c]] for c in g.maps}
    return ReparamElement(f, maps)


def inverse(g: ReparamElement) -> ReparamElement:
    finv = g.f_inv()
    return ReparamElement(finv, {b: g.maps[g.f[b]].inverse() for b in g.maps})


def automorphisms(tree: BubbleTree) -> list:
    """All automorphisms of the underlying tree preserving types and energies, as dicts."""
    import networkx as nx
    from networkx.algorithms.isomorphism import GraphMatcher

    G = nx.Graph()
    for v, t in tree.types.items():
        G.add_node(v, kind=(t, vertex_energy(tree, v)))
    G.add_edges_from(tree.edges)
    gm = GraphMatcher(G, G, node_match=lambda a, b: a["kind"] == b["kind"])
    autos = [dict(m) for m in gm.isomorphisms_iter()]
    autos.sort(key=lambda m: [_sortkey(m[v]) for v in tree.vertices])
    return autos
