"""Limit bubble trees of degenerating zero configurations.

A :class:`ConfigurationFamily` samples ``d`` zero tracks (and optional marked
tracks) at scales ``nu_1 < ... < nu_m``. Growth exponents of pairwise
distances, estimated by least squares in log-log coordinates, are grouped
into levels:

* the level around 0 (relatively bounded pairs) defines the vortex bubbles
  (T1 vertices, possibly ghosts made of marked points only);
* each positive level merges bubbles under a ghost sphere (Tinf vertex);
* negative levels (marked points colliding inside a bubble) produce ghost
  spheres of type T0.

:func:`check_convergence` evaluates the finite-scale residual of each
convergence condition and turns the sequence into a verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .config import ZeroConfig
from .errors import AmbiguousExponents, UnstableLimit, ValidationError
from .mobius import Mobius
from .moduli import INF, SymPoint, chordal, iota, sym_distance
from .stable_maps import T0, T1, TINF, BubbleTree, validate

__all__ = [
    "ConfigurationFamily", "MobiusFamily", "ExtractionReport", "ConvergenceReport",
    "extract_bubble_tree", "check_convergence", "pair_exponents", "sphere_net",
    "GAP", "MIN_SCALES", "DEFAULT_TOL",
]

GAP = 0.25          # exponent gap separating levels
MIN_SCALES = 4
DEFAULT_TOL = 1e-3  # chordal convergence tolerance
LOG_FLOOR = 1e-12   # distances below this count as coincident
MERGE_DIST = 1e-9
SPAN_LIMIT = 0.35   # a level wider than this is a chain of unresolved exponents
NOISE_FLOOR = 1e-9  # residuals below this are round-off
RATE_LIMIT = -0.25  # slowest local decay rate accepted as convergence to zero


def _as_track_array(tracks, m, what):
    arr = np.array([[complex(p["re"], p["im"]) if isinstance(p, dict) else complex(p) for p in t]
                    for t in tracks], dtype=np.complex128).reshape(len(tracks), -1) if len(tracks) else np.zeros((0, m), np.complex128)
    if arr.shape[1] != m:
        raise ValidationError(f"every {what} needs {m} samples")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} positions must be finite")
    return arr


class ConfigurationFamily:
    """Scale-indexed zero tracks and marked-point tracks.

    Multiplicity is expressed by repeating a track.
    """

    def __init__(self, scales, tracks, marked_tracks=()):
        s = np.array(scales, dtype=float).ravel()
        if s.size < 1 or not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise ValidationError("scales must be positive reals")
        if np.any(np.diff(s) <= 0):
            raise ValidationError("scales must be strictly increasing")
        self.scales = s
        self.tracks = _as_track_array(list(tracks), s.size, "track")
        self.marked = _as_track_array(list(marked_tracks), s.size, "marked track")
        self.scales.setflags(write=False)
        self.tracks.setflags(write=False)
        self.marked.setflags(write=False)

    @property
    def m(self) -> int:
        return self.scales.size

    @property
    def d(self) -> int:
        return self.tracks.shape[0]

    @property
    def k(self) -> int:
        return self.marked.shape[0]

    def config_at(self, i: int) -> ZeroConfig:
        return ZeroConfig.from_points(self.tracks[:, i], tol=MERGE_DIST)

    def translate(self, c) -> "ConfigurationFamily":
        return ConfigurationFamily(self.scales, self.tracks + c, self.marked + c)

    def to_json(self) -> dict:
        enc = lambda arr: [[{"re": z.real, "im": z.imag} for z in row] for row in arr]
        out = {"scales": self.scales.tolist(), "tracks": enc(self.tracks)}
        if self.k:
            out["marked_tracks"] = enc(self.marked)
        return out

    @classmethod
    def from_json(cls, data) -> "ConfigurationFamily":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(data["scales"], data["tracks"], data.get("marked_tracks", []))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed family JSON: {exc}") from None


class MobiusFamily:
    """Per-vertex sequences of Möbius maps, one per scale."""

    def __init__(self, maps):
        self.maps = {v: list(seq) for v, seq in maps.items()}

    def __getitem__(self, v):
        return self.maps[v]

    def to_json(self) -> dict:
        return {"maps": [{"vertex": v, "seq": [m.to_json() for m in seq]}
                         for v, seq in self.maps.items()]}

    @classmethod
    def from_json(cls, data) -> "MobiusFamily":
        if isinstance(data, str):
            data = json.loads(data)
        return cls({e["vertex"]: [Mobius.from_json(m) for m in e["seq"]] for e in data["maps"]})


# -- exponents -----------------------------------------------------------------

def _slope(logs, y):
    if np.ptp(y) == 0:
        return 0.0, 0.0
    res = stats.linregress(logs, y)
    return float(res.slope), float(res.stderr)


def pair_exponents(points: np.ndarray, scales: np.ndarray):
    """Growth exponent and standard error for every pair of tracks.

    Returns dicts keyed by ``(a, b)`` with ``a < b``.
    """
    logs = np.log(scales)
    exp, err = {}, {}
    n = points.shape[0]
    for a in range(n):
        for b in range(a + 1, n):
            y = np.log(np.maximum(np.abs(points[a] - points[b]), LOG_FLOOR))
            exp[(a, b)], err[(a, b)] = _slope(logs, y)
    return exp, err


def _levels(exp, err):
    """Group exponent values into levels separated by gaps larger than GAP."""
    items = sorted(exp, key=lambda k: exp[k])
    groups = []
    for key in items:
        if groups and exp[key] - exp[groups[-1][-1]] <= GAP:
            groups[-1].append(key)
        else:
            groups.append([key])
    for g in groups:
        span = exp[g[-1]] - exp[g[0]]
        if span > SPAN_LIMIT:
            raise AmbiguousExponents(
                f"exponents from {exp[g[0]]:.3f} to {exp[g[-1]]:.3f} chain into one level; "
                "more scales or a wider scale range are needed")
    for lo, hi in zip(groups, groups[1:]):
        a, b = lo[-1], hi[0]
        gap = exp[b] - exp[a]
        se = max(err[a], err[b])
        if gap <= 2 * se:
            raise AmbiguousExponents(
                f"exponents {exp[a]:.3f} and {exp[b]:.3f} are within 2 standard errors ({se:.3f})")
    return [(exp[g[0]], exp[g[-1]]) for g in groups]


class _DSU:
    def __init__(self, items):
        self.p = {i: i for i in items}

    def find(self, i):
        while self.p[i] != i:
            self.p[i] = self.p[self.p[i]]
            i = self.p[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def _components(items, exp, threshold):
    dsu = _DSU(items)
    s = set(items)
    for (a, b), e in exp.items():
        if a in s and b in s and e <= threshold:
            dsu.union(a, b)
    comps = {}
    for i in items:
        comps.setdefault(dsu.find(i), []).append(i)
    return sorted((sorted(c) for c in comps.values()), key=lambda c: c[0])


@dataclass
class _Node:
    kind: str
    items: list                 # track indices (zeros then marks) under this node
    children: list = field(default_factory=list)
    marks: list = field(default_factory=list)   # indices of marked tracks sitting here
    level: float = 0.0
    vid: int = -1


@dataclass
class ExtractionReport:
    exponents: dict
    stderr: dict
    levels: list
    vertex_levels: dict
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "exponents": [{"pair": list(k), "exponent": v, "stderr": self.stderr[k]}
                          for k, v in sorted(self.exponents.items())],
            "levels": [list(x) for x in self.levels],
            "vertex_levels": {str(k): v for k, v in self.vertex_levels.items()},
            "notes": list(self.notes),
        }


def extract_bubble_tree(family: ConfigurationFamily):
    """Limit stable map of a family, with per-vertex reparametrisations and a report.

    Vertex 0 is the root; other ids follow breadth-first order with children
    sorted by their lowest track index. On every ghost sphere the first child
    sits at 0 and the second at 1 (marked points act as anchors when there
    are fewer than two children).
    """
    if family.d < 1:
        raise ValidationError("extraction needs at least one zero track")
    if family.m < MIN_SCALES:
        raise AmbiguousExponents(f"{family.m} scales given; at least {MIN_SCALES} are needed")
    d, k = family.d, family.k
    P = np.vstack([family.tracks, family.marked])
    n = P.shape[0]
    exp, err = pair_exponents(P, family.scales)
    levels = _levels(exp, err) if exp else []
    neg = [lv for lv in levels if lv[1] <= -GAP]
    pos = [lv for lv in levels if lv[0] >= GAP]
    # everything that is neither clearly colliding nor clearly separating is bounded
    base_threshold = pos[0][0] - 1e-12 if pos else math.inf
    items = list(range(n))

    # base components: bounded clusters
    comps = _components(items, exp, base_threshold)
    current = []
    for c in comps:
        zeros = [i for i in c if i < d]
        marks = [i for i in c if i >= d]
        if zeros or len(marks) >= 2:
            node = _Node(T1, c, level=0.0)
            node.children = _collisions(marks, exp, neg)
            node.marks = [i for i in marks if not any(i in ch.items for ch in node.children)]
            current.append(node)
        else:
            current.append(_Node("mark", c))
    # separation levels
    for lo, hi in pos:
        merged = _components(items, exp, hi)
        nxt = []
        for c in merged:
            parts = [x for x in current if x.items[0] in c]
            if len(parts) == 1:
                nxt.append(parts[0])
                continue
            node = _Node(TINF, c, level=hi)
            node.children = [x for x in parts if x.kind != "mark"]
            node.marks = [x.items[0] for x in parts if x.kind == "mark"]
            nxt.append(node)
        current = nxt
    if len(current) != 1:  # pragma: no cover - every pair belongs to some level
        raise AmbiguousExponents("tracks do not assemble into a single tree")
    root = current[0]
    if root.kind == "mark":  # pragma: no cover - d >= 1 prevents this
        raise ValidationError("no zero tracks")

    # ids in breadth-first order
    order = [root]
    for node in order:
        node.children.sort(key=lambda c: c.items[0])
        order.extend(node.children)
    for i, node in enumerate(order):
        node.vid = i

    maps = {node.vid: _frames(node, P, d, family) for node in order}
    last = -1
    types, edges, vortex, nodal = {}, [], {}, {}
    marked_at = {}
    for node in order:
        v = node.vid
        types[v] = node.kind
        phi_inv = maps[v][last].inverse()
        if node.kind == T1:
            vortex[v] = _limit_config(node, P, d, exp, neg, maps[v][last])
        for ch in node.children:
            edges.append((v, ch.vid))
            nodal[(ch.vid, v)] = INF
            nodal[(v, ch.vid)] = phi_inv(_centroid(ch.items, P, d)[last])
        for i in node.marks:
            marked_at[i - d] = (v, phi_inv(P[i, last]))
    marked = [(root.vid, INF)] + [marked_at[j] for j in range(k)]
    tree = BubbleTree(types, edges, vortex, nodal, marked)
    report = ExtractionReport(exp, err, levels, {node.vid: node.level for node in order})
    violations = validate(tree)
    if violations:
        raise UnstableLimit("extracted tree is not stable: " + "; ".join(map(str, violations)),
                            violations)
    return tree, MobiusFamily(maps), report


def _collisions(marks, exp, neg):
    """T0 ghost hierarchy for marked points colliding inside one bubble."""
    if len(marks) < 2 or not neg:
        return []
    thresholds = [hi for _, hi in neg]

    def build(group, j):
        # group is connected at threshold j; split at the next faster level
        sub = _components(group, exp, thresholds[j - 1]) if j > 0 else [[i] for i in group]
        node = _Node(T0, sorted(group), level=neg[j][1])
        for s in sub:
            if len(s) >= 2:
                jj = next(t for t in range(j) if len(_components(s, exp, thresholds[t])) == 1)
                node.children.append(build(s, jj))
            else:
                node.marks.append(s[0])
        return node

    out = []
    for c in _components(marks, exp, thresholds[-1]):
        if len(c) >= 2:
            j = next(t for t in range(len(thresholds)) if len(_components(c, exp, thresholds[t])) == 1)
            out.append(build(c, j))
    return out


def _centroid(items, P, d):
    zeros = [i for i in items if i < d]
    use = zeros if zeros else list(items)
    return P[use].mean(axis=0)


def _anchors(node, P, d):
    anchors = [_centroid(ch.items, P, d) for ch in sorted(node.children, key=lambda c: c.items[0])]
    anchors += [P[i] for i in sorted(node.marks)]
    return anchors


def _frames(node, P, d, family):
    m = family.m
    if node.kind == T1:
        bounded = all(_slope(np.log(family.scales), np.log(np.maximum(np.abs(P[i]), 1.0)))[0] < GAP
                      for i in node.items)
        if bounded:
            return [Mobius.identity() for _ in range(m)]
        c = _centroid(node.items, P, d)
        return [Mobius.translation(c[j]) for j in range(m)]
    a = _anchors(node, P, d)
    if len(a) < 2:  # pragma: no cover - stability guarantees two anchors
        raise UnstableLimit("ghost sphere with fewer than two anchors")
    return [Mobius.affine(a[1][j] - a[0][j], a[0][j]) for j in range(m)]


def _limit_config(node, P, d, exp, neg, phi):
    zeros = [i for i in node.items if i < d]
    if not zeros:
        return ZeroConfig()
    collide = neg[-1][1] if neg else -math.inf
    dsu = _DSU(zeros)
    for a in zeros:
        for b in zeros:
            if a < b and (exp[(a, b)] <= collide or abs(P[a, -1] - P[b, -1]) <= MERGE_DIST):
                dsu.union(a, b)
    groups = {}
    for i in zeros:
        groups.setdefault(dsu.find(i), []).append(i)
    inv = phi.inverse()
    entries = [(inv(complex(P[g, -1].mean())), len(g)) for g in groups.values()]
    return ZeroConfig(tuple(entries))


# -- convergence ---------------------------------------------------------------

def sphere_net(n: int = 400):
    """Fibonacci-sphere sample, stereographically projected (north pole = infinity)."""
    k = np.arange(n) + 0.5
    zc = 1 - 2 * k / n
    theta = math.pi * (1 + 5 ** 0.5) * k
    rho = np.sqrt(np.maximum(0.0, 1 - zc * zc))
    pts = []
    for x, y, z in zip(rho * np.cos(theta), rho * np.sin(theta), zc):
        pts.append(INF if z >= 1 else complex(x, y) / (1 - z))
    return pts + [INF, 0j]


@dataclass
class ConditionResult:
    name: str
    residuals: list
    verdict: str
    reason: str
    integer: bool = False

    def to_json(self):
        return {"name": self.name, "residuals": self.residuals, "verdict": self.verdict,
                "reason": self.reason}


@dataclass
class ConvergenceReport:
    scales: list
    conditions: dict
    induced_nodal: dict
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(c.verdict == "PASS" for c in self.conditions.values())

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def failing(self):
        return [c.name for c in self.conditions.values() if c.verdict != "PASS"]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "scales": self.scales,
            "conditions": {k: c.to_json() for k, c in self.conditions.items()},
            "induced_nodal": [{"from": a, "to": b, "z": "inf" if z is INF else [z.real, z.imag]}
                              for (a, b), z in self.induced_nodal.items()],
        }

    def text(self) -> str:
        lines = [f"convergence: {self.verdict} (tolerance {self.tolerance:g})"]
        for c in self.conditions.values():
            tail = ", ".join(f"{r:.3g}" for r in c.residuals[-3:])
            lines.append(f"  {c.name:<12} {c.verdict}  last residuals [{tail}]  {c.reason}")
        return "\n".join(lines)


def _verdict(name, scales, res, tol, integer=False):
    r = [float(x) for x in res]
    if len(r) < 3:
        return ConditionResult(name, r, "FAIL", "fewer than three scales", integer)
    last = r[-3:]
    if integer:
        ok = all(x <= 1e-12 for x in last)
        return ConditionResult(name, r, "PASS" if ok else "FAIL",
                               "exact on the last three scales" if ok else "nonzero on the last three scales",
                               integer)
    if max(last) <= NOISE_FLOOR:
        return ConditionResult(name, r, "PASS", "zero up to round-off")
    if last[-1] <= tol and last[0] >= last[1] >= last[2]:
        return ConditionResult(name, r, "PASS", "final residual within tolerance")
    if not (last[0] > last[1] > last[2]):
        return ConditionResult(name, r, "FAIL", "residuals not decreasing over the last three scales")
    if min(last) <= 0:
        return ConditionResult(name, r, "FAIL", "residuals not decreasing over the last three scales")
    # local log-log slopes over the last two intervals: power decay to zero
    ls = np.log(scales[-3:])
    slopes = np.diff(np.log(last)) / np.diff(ls)
    rate = float(slopes.max())
    if rate <= RATE_LIMIT:
        return ConditionResult(name, r, "PASS",
                               f"decaying like nu^{rate:.2f} (final {r[-1]:.3g})")
    return ConditionResult(name, r, "FAIL",
                           f"residual {r[-1]:.3g} above tolerance and levelling off (local rate nu^{rate:.2f})")


def _path_point(tree, v):
    """First special point on the way from ``v`` towards alpha_0 (z_0 on alpha_0 itself)."""
    if v == tree.root:
        return tree.marked[0][1]
    return tree.nodal[(v, tree.parent_map()[v])]


def check_convergence(family: ConfigurationFamily, tree: BubbleTree, reparams: MobiusFamily,
                      tol: float = DEFAULT_TOL, net_size: int = 400) -> ConvergenceReport:
    """Finite-scale residuals of each convergence condition, with verdicts."""
    m = family.m
    if set(reparams.maps) != set(tree.types):
        raise ValidationError("need one Möbius sequence per tree vertex")
    if any(len(seq) != m for seq in reparams.maps.values()):
        raise ValidationError(f"every Möbius sequence must have {m} entries")
    if family.k != len(tree.marked) - 1:
        raise ValidationError(f"family has {family.k} marked tracks, tree has {len(tree.marked) - 1}")
    d = family.d
    scales = family.scales.tolist()
    T1s = tree.T1
    Tinfs = tree.Tinf
    degs = {v: tree.vortex[v].degree for v in T1s}
    total = sum(degs.values())
    net = sphere_net(net_size)
    probes = [0j, 1 + 0j, -1 + 0j, 1j, -1j]

    res = {k: [] for k in ("degree", "energy", "translation", "infinity", "derivative",
                           "edges", "sym", "marked")}
    for j in range(m):
        X = family.tracks[:, j]
        # degree identity plus per-bubble zero counts
        r = abs(d - total)
        for v in T1s:
            inv = reparams[v][j].inverse()
            cfg = tree.vortex[v]
            radius = 1.0 + cfg.max_abs()
            pulled = [inv(x) for x in X]
            cnt = sum(1 for p in pulled if p is not INF and abs(p) <= radius)
            r += abs(cnt - degs[v])
        res["degree"].append(float(r))
        res["energy"].append(math.pi * abs(d - total))
        # T1 frames must be translations
        dev = 0.0
        for v in T1s:
            a, _, c, dd = reparams[v][j].coefficients
            dev = max(dev, abs(c) + abs(a - dd))
        res["translation"].append(dev)
        # ghost-sphere frames send z_{alpha,0} to infinity and zoom out
        r_inf, r_der = 0.0, 0.0
        for v in Tinfs:
            z0 = _path_point(tree, v)
            r_inf = max(r_inf, chordal(reparams[v][j](z0), INF))
            psi = Mobius.identity() if z0 is INF else Mobius(z0, 1, 1, 0)
            _, _, c, dd = (reparams[v][j] @ psi).coefficients
            r_der = max(r_der, max(abs(c * s + dd) ** 2 for s in probes))
        res["infinity"].append(r_inf)
        res["derivative"].append(r_der)
        # edge maps converge to the nodal point away from the opposite one
        r = 0.0
        for a, b in tree.directed_edges():
            comp = reparams[a][j].inverse() @ reparams[b][j]
            target, avoid = tree.nodal[(a, b)], tree.nodal[(b, a)]
            for w in net:
                if chordal(w, avoid) >= 0.5:
                    r = max(r, chordal(comp(w), target))
        res["edges"].append(r)
        # symmetric-product convergence per bubble
        r = 0.0
        for v in T1s:
            inv = reparams[v][j].inverse()
            pulled = SymPoint([inv(x) for x in X])
            r = max(r, sym_distance(pulled, iota(tree.vortex[v], d)))
        res["sym"].append(r)
        # marked points
        r = 0.0
        for i in range(1, len(tree.marked)):
            v, zi = tree.marked[i]
            r = max(r, chordal(reparams[v][j].inverse()(family.marked[i - 1, j]), zi))
        res["marked"].append(r)

    integer = {"degree", "energy", "translation"}
    conds = {name: _verdict(name, scales, seq, tol, name in integer) for name, seq in res.items()}
    induced = {}
    for a, b in tree.directed_edges():
        comp = reparams[a][-1].inverse() @ reparams[b][-1]
        ref = 0j if tree.types[b] == T1 or tree.nodal[(b, a)] is INF else INF
        induced[(a, b)] = comp(ref if tree.nodal[(b, a)] is not ref else 1 + 0j)
    return ConvergenceReport(scales, conds, induced, tol)
