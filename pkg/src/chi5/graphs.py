"""Unit-distance graphs: the 481-vertex base graph, t-Golomb root graphs,
triangular-lattice patches and the two-lattice configuration."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from typing import Iterable, Sequence

from .ring import (GROUP, SQRT3_NORM, RingVector, enumerate_unit_vectors,
                   has_rotation_parity, is_unit, norm_sq, parse_vector, Norm33)


class GraphConstructionError(ValueError):
    pass


# Orbit representatives of the base graph, grouped by orbit order 1 / 6 / 12 / 24.
BASE_ORBIT_REPS: tuple[RingVector, ...] = tuple(RingVector(*v) for v in [
    (0, 0, 0, 0),
    (0, 0, 4, 0), (12, 0, 0, 0), (0, 0, 8, 0), (0, 0, 12, 0),
    (6, 2, 0, 0), (2, 0, 0, 2), (10, 0, 0, 2), (0, 2, 2, 0), (4, 0, 0, 4),
    (14, 0, 0, 2), (0, 2, 6, 0), (8, 0, 0, 4), (6, 0, 0, 6), (0, 2, 10, 0),
    (2, 0, 4, 2), (12, 2, 2, 0), (2, 0, 6, 4), (4, 0, 2, 2), (4, 0, 6, 2),
    (4, 0, 4, 4), (8, 0, 2, 2), (8, 0, 6, 2), (6, 2, 4, 0), (2, 0, 2, 4),
    (10, 0, 4, 2), (8, 0, 4, 4), (12, 2, 6, 0), (6, 2, 8, 0),
])

# Orbits holding the t-Golomb vertices.
ROOT_ORBIT_REPS = (RingVector(0, 0, 0, 0), RingVector(12, 0, 0, 0), RingVector(2, 0, 0, 2))


@dataclass(frozen=True)
class Orbit:
    representative: RingVector
    members: tuple[RingVector, ...]
    radii: tuple[Norm33, ...]

    @property
    def order(self) -> int:
        return len(self.members)


def expand_orbit(rep) -> Orbit:
    """Images of ``rep`` under the 24 symmetries, in generation order."""
    rep = RingVector(*rep)
    members: list[RingVector] = []
    seen = set()
    for s in GROUP:
        w = s(rep)
        if w not in seen:
            seen.add(w)
            members.append(w)
    radii = tuple(sorted({norm_sq(m) for m in members}, key=lambda n: n.value()))
    return Orbit(rep, tuple(members), radii)


class UnitDistanceGraph:
    """Vertices are ring vectors with 1-based ids; edges join unit-distance pairs."""

    def __init__(self, name: str, vertices: Sequence, orbit_of: dict | None = None):
        self.name = name
        self.vertices: tuple[RingVector, ...] = tuple(RingVector(*v) for v in vertices)
        self._index = {}
        for i, v in enumerate(self.vertices, start=1):
            if v in self._index:
                raise GraphConstructionError(f"duplicate vertex {v} in graph {name}")
            self._index[v] = i
        self.orbit_of: dict[int, RingVector] = dict(orbit_of or {})
        units = enumerate_unit_vectors()
        adj: dict[int, set[int]] = {i: set() for i in self.ids}
        verts = self.vertices
        for i in range(len(verts)):
            vi = verts[i]
            for j in range(i + 1, len(verts)):
                if vi - verts[j] in units:
                    adj[i + 1].add(j + 1)
                    adj[j + 1].add(i + 1)
        self._adj = {i: frozenset(s) for i, s in adj.items()}

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"UnitDistanceGraph({self.name!r}, {len(self)} vertices, {self.edge_count()} edges)"

    @property
    def ids(self) -> range:
        return range(1, len(self.vertices) + 1)

    def vertex(self, i: int) -> RingVector:
        if not 1 <= i <= len(self.vertices):
            raise KeyError(f"no vertex {i} in graph {self.name}")
        return self.vertices[i - 1]

    def id_of(self, v) -> int:
        return self._index[RingVector(*v)]

    def get_id(self, v):
        return self._index.get(RingVector(*v))

    def __contains__(self, v) -> bool:
        return RingVector(*v) in self._index

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def adjacent(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.ids for j in sorted(self._adj[i]) if i < j]

    def edge_count(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def adjacency_by_norm(self) -> dict[int, frozenset[int]]:
        """Adjacency recomputed pairwise with :func:`is_unit` (slow, for cross-checks)."""
        out = {i: set() for i in self.ids}
        for i, j in itertools.combinations(self.ids, 2):
            if is_unit(self.vertex(i) - self.vertex(j)):
                out[i].add(j)
                out[j].add(i)
        return {i: frozenset(s) for i, s in out.items()}

    def subgraph(self, ids: Iterable[int], name: str | None = None) -> "UnitDistanceGraph":
        keep = sorted(set(ids))
        orbit = {k: self.orbit_of[i] for k, i in enumerate(keep, start=1) if i in self.orbit_of}
        return UnitDistanceGraph(name or f"{self.name}-sub{len(keep)}",
                                 [self.vertex(i) for i in keep], orbit)


@cache
def build_base_graph() -> UnitDistanceGraph:
    vertices: list[RingVector] = []
    orbit_of: dict[int, RingVector] = {}
    seen: set[RingVector] = set()
    for rep in BASE_ORBIT_REPS:
        for m in expand_orbit(rep).members:
            if m in seen:
                raise GraphConstructionError(f"vertex {m} of orbit {rep} already placed")
            seen.add(m)
            vertices.append(m)
            orbit_of[len(vertices)] = rep
    return UnitDistanceGraph("base481", vertices, orbit_of)


@dataclass(frozen=True)
class OrbitStat:
    representative: RingVector
    radii: tuple[float, ...]
    degree: int
    order: int


def orbit_stats(g: UnitDistanceGraph) -> list[OrbitStat]:
    """One row per orbit, in order of first appearance."""
    groups: dict[RingVector, list[int]] = {}
    for i in g.ids:
        groups.setdefault(g.orbit_of[i], []).append(i)
    rows = []
    for rep, members in groups.items():
        degrees = {g.degree(i) for i in members}
        if len(degrees) != 1:
            raise GraphConstructionError(f"orbit {rep} has mixed vertex degrees {sorted(degrees)}")
        radii = sorted({round(norm_sq(g.vertex(i)).radius(), 4) for i in members})
        rows.append(OrbitStat(rep, tuple(radii), degrees.pop(), len(members)))
    return rows


# Published orbit table: representative, distinct radii, vertex degree, orbit order.
REFERENCE_ORBITS = (
    ((0, 0, 0, 0), (0,), 30, 1),
    ((0, 0, 4, 0), (0.5774,), 24, 6),
    ((12, 0, 0, 0), (1,), 23, 6),
    ((0, 0, 8, 0), (1.1547,), 18, 6),
    ((0, 0, 12, 0), (1.7321,), 8, 6),
    ((6, 2, 0, 0), (0.4574, 1.4574), 15, 12),
    ((2, 0, 0, 2), (0.5774,), 20, 12),
    ((10, 0, 0, 2), (1,), 16, 12),
    ((0, 2, 2, 0), (1,), 22, 12),
    ((4, 0, 0, 4), (1.1547,), 11, 12),
    ((14, 0, 0, 2), (1.2910,), 8, 12),
    ((0, 2, 6, 0), (1.2910,), 12, 12),
    ((8, 0, 0, 4), (1.2910,), 10, 12),
    ((6, 0, 0, 6), (1.7321,), 6, 12),
    ((0, 2, 10, 0), (1.7321,), 8, 12),
    ((2, 0, 4, 2), (0.1685, 1.1423), 15, 24),
    ((12, 2, 2, 0), (0.2918, 1.9786), 13, 24),
    ((2, 0, 6, 4), (0.2918, 1.9786), 8, 24),
    ((4, 0, 2, 2), (0.4253, 0.9051), 16, 24),
    ((4, 0, 6, 2), (0.4574, 1.4574), 12, 24),
    ((4, 0, 4, 4), (0.6246, 1.7156), 7, 24),
    ((8, 0, 2, 2), (0.7171, 1.0735), 12, 24),
    ((8, 0, 6, 2), (0.7366, 1.5676), 10, 24),
    ((6, 2, 4, 0), (0.7366, 1.5676), 15, 24),
    ((2, 0, 2, 4), (0.8337, 1.4041), 9, 24),
    ((10, 0, 4, 2), (0.8337, 1.4041), 9, 24),
    ((8, 0, 4, 4), (0.8505, 1.8101), 8, 24),
    ((12, 2, 6, 0), (0.8671, 2.1405), 8, 24),
    ((6, 2, 8, 0), (1.2420, 1.8594), 9, 24),
)

# one published radius is rounded up in its last digit, so compare at 1e-4
RADIUS_TOL = 1e-4


def check_orbit_table(g: UnitDistanceGraph) -> list[str]:
    """Differences between the orbits of ``g`` and the reference table."""
    problems = []
    stats = {s.representative: s for s in orbit_stats(g)}
    if len(stats) != len(REFERENCE_ORBITS):
        problems.append(f"{len(stats)} orbits, reference has {len(REFERENCE_ORBITS)}")
    for rep, radii, degree, order in REFERENCE_ORBITS:
        s = stats.get(RingVector(*rep))
        if s is None:
            problems.append(f"orbit {rep} missing")
            continue
        if s.degree != degree:
            problems.append(f"orbit {rep}: degree {s.degree}, reference {degree}")
        if s.order != order:
            problems.append(f"orbit {rep}: order {s.order}, reference {order}")
        exact = sorted({norm_sq(m).radius() for m in expand_orbit(rep).members})
        if len(exact) != len(radii) or any(abs(x - y) > RADIUS_TOL for x, y in zip(exact, radii)):
            problems.append(f"orbit {rep}: radii {[round(x, 6) for x in exact]}, reference {list(radii)}")
    return problems


# Unified numbering of root vertices: centre, hexagon, then inner unit triangles.
# Triangle k+1 is attached to the hexagon vertices of triple {2,3,4} (k=0) or {5,6,7} (k=1);
# triangles 3 and 4 are the mirror images of 1 and 2.
T_GOLOMB_VERTICES: tuple[RingVector, ...] = tuple(RingVector(*v) for v in [
    (0, 0, 0, 0),
    (-6, 0, 6, 0), (-6, 0, -6, 0), (12, 0, 0, 0),
    (6, 0, 6, 0), (6, 0, -6, 0), (-12, 0, 0, 0),
    (-1, -1, 1, -1), (-1, 1, -1, -1), (2, 0, 0, 2),
    (1, 1, -1, 1), (1, -1, 1, 1), (-2, 0, 0, -2),
    (-1, -1, -1, 1), (-1, 1, 1, 1), (2, 0, 0, -2),
    (1, 1, 1, -1), (1, -1, -1, -1), (-2, 0, 0, 2),
])

T_GOLOMB_NAMES = {0: "wheel", 1: "golomb", 2: "golomb2", 4: "golomb4"}


def build_t_golomb(t: int) -> UnitDistanceGraph:
    if t not in T_GOLOMB_NAMES:
        raise ValueError(f"t must be one of 0, 1, 2, 4; got {t}")
    verts = T_GOLOMB_VERTICES[:7 + 3 * t]
    base = build_base_graph()
    orbit = {k: base.orbit_of[base.id_of(v)] for k, v in enumerate(verts, start=1)}
    return UnitDistanceGraph(T_GOLOMB_NAMES[t], verts, orbit)


def graph_by_name(name: str) -> UnitDistanceGraph:
    if name == "base481":
        return build_base_graph()
    for t, n in T_GOLOMB_NAMES.items():
        if n == name:
            return build_t_golomb(t)
    raise KeyError(f"unknown graph {name!r}")


def sqrt3_triples(g: UnitDistanceGraph) -> list[tuple[int, int, int]]:
    far: dict[int, set[int]] = {i: set() for i in g.ids}
    for i, j in itertools.combinations(g.ids, 2):
        if norm_sq(g.vertex(i) - g.vertex(j)) == SQRT3_NORM:
            far[i].add(j)
            far[j].add(i)
    out = []
    for i in g.ids:
        for j in sorted(far[i]):
            if j <= i:
                continue
            for k in sorted(far[i] & far[j]):
                if k > j:
                    out.append((i, j, k))
    return out


# ---------------------------------------------------------------- text format

def format_graph(g: UnitDistanceGraph, with_edges: bool = True) -> str:
    lines = [f"UDGRAPH {g.name} {len(g)}"]
    lines += [f"{i} {g.vertex(i)}" for i in g.ids]
    if with_edges:
        lines.append("EDGES")
        lines += [f"{i} {j}" for i, j in g.edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> UnitDistanceGraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [(n, ln) for n, ln in enumerate(lines, start=1) if ln]
    if not lines:
        raise ValueError("empty graph file")
    n0, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "UDGRAPH":
        raise ValueError(f"line {n0}: expected 'UDGRAPH <name> <count>'")
    name, count = parts[1], int(parts[2])
    verts = []
    k = 1
    while k < len(lines) and lines[k][1] != "EDGES":
        n, ln = lines[k]
        ident, _, vec = ln.partition(" ")
        if int(ident) != len(verts) + 1:
            raise ValueError(f"line {n}: expected vertex id {len(verts) + 1}, got {ident}")
        verts.append(parse_vector(vec))
        k += 1
    if len(verts) != count:
        raise ValueError(f"header announces {count} vertices, found {len(verts)}")
    g = UnitDistanceGraph(name, verts)
    try:
        ref = graph_by_name(name)
    except KeyError:
        ref = None
    if ref is not None and ref.vertices == g.vertices:
        g.orbit_of = dict(ref.orbit_of)
    if k < len(lines):
        listed = set()
        for n, ln in lines[k + 1:]:
            u, v = (int(x) for x in ln.split())
            listed.add((min(u, v), max(u, v)))
        if listed != set(g.edges()):
            raise ValueError("EDGES section disagrees with unit-distance adjacency")
    return g


# ---------------------------------------------------------- lattice patches

AXIAL_DIRECTIONS = ((1, 0), (0, 1), (-1, 1))
HEX_RING = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))  # counter-clockwise from angle 0


def hex_distance(p) -> int:
    i, j = p
    return max(abs(i), abs(j), abs(i + j))


def axial_sq_dist(p, q) -> int:
    di, dj = p[0] - q[0], p[1] - q[1]
    return di * di + di * dj + dj * dj


def axial_rotate(p):
    i, j = p
    return (-j, i + j)


def axial_reflect(p):
    i, j = p
    return (j, i)


def hex_symmetries():
    """The 12 lattice symmetries fixing the origin, as point maps."""
    maps = []
    for k in range(6):
        for m in (False, True):
            def f(p, k=k, m=m):
                if m:
                    p = axial_reflect(p)
                for _ in range(k):
                    p = axial_rotate(p)
                return p
            maps.append(f)
    return maps


class LatticePatch:
    """Triangular-lattice ball of hex radius ``r`` with unit edges.

    ``(i, j)`` is the point ``i*(1, 0) + j*(1/2, sqrt(3)/2)``.
    """

    def __init__(self, radius: int):
        if radius < 1:
            raise ValueError("patch radius must be >= 1")
        self.radius = radius
        self.name = f"patch{radius}"
        pts = [(i, j) for i in range(-radius, radius + 1) for j in range(-radius, radius + 1)
               if hex_distance((i, j)) <= radius]
        pts.sort(key=lambda p: (hex_distance(p), p))
        self.points: tuple[tuple[int, int], ...] = tuple(pts)
        self._index = {p: k for k, p in enumerate(self.points, start=1)}
        self._adj = {self._index[p]: frozenset(self._index[q] for q in self.points
                                               if axial_sq_dist(p, q) == 1)
                     for p in self.points}
        self.sqrt3_triples: list[tuple[int, int, int]] = [
            (a, b, c) for a, b, c in itertools.combinations(self.ids, 3)
            if axial_sq_dist(self.point(a), self.point(b)) == 3
            and axial_sq_dist(self.point(a), self.point(c)) == 3
            and axial_sq_dist(self.point(b), self.point(c)) == 3]

    def __len__(self):
        return len(self.points)

    @property
    def ids(self) -> range:
        return range(1, len(self.points) + 1)

    def point(self, i: int):
        return self.points[i - 1]

    def id_of(self, p) -> int:
        return self._index[tuple(p)]

    def get_id(self, p):
        return self._index.get(tuple(p))

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def edges(self):
        return [(i, j) for i in self.ids for j in sorted(self._adj[i]) if i < j]

    def interior(self) -> list[int]:
        """Ids whose whole unit wheel lies in the patch."""
        return [i for i in self.ids if hex_distance(self.point(i)) <= self.radius - 1]

    def symmetry_permutations(self) -> list[tuple[int, ...]]:
        """Vertex permutations (index 0 unused) induced by the hexagonal symmetries."""
        perms = set()
        for f in hex_symmetries():
            perms.add((0,) + tuple(self.id_of(f(p)) for p in self.points))
        return sorted(perms)


def build_lattice_patch(radius: int) -> LatticePatch:
    return LatticePatch(radius)


# ------------------------------------------------------ two-lattice geometry

@dataclass(frozen=True)
class QuadraticSurd:
    """``x + y*sqrt(radicand)`` with rational parts."""

    x: Fraction
    y: Fraction = Fraction(0)
    radicand: Fraction = Fraction(0)

    def equals_rational(self, q) -> bool:
        q = Fraction(q)
        if self.y == 0 or self.radicand == 0:
            return self.x == q
        root = _rational_sqrt(self.radicand)
        if root is None:
            return False
        return self.x + self.y * root == q


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = _isqrt_exact(n), _isqrt_exact(d)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt_exact(n: int):
    r = math.isqrt(n)
    return r if r * r == n else None


# cos(k * 60 deg) and sin(k * 60 deg) / (sqrt(3)/2)
_COS60 = (Fraction(1), Fraction(1, 2), Fraction(-1, 2), Fraction(-1), Fraction(-1, 2), Fraction(1, 2))
_SIN60_SIGN = (0, 1, 1, 0, -1, -1)


@dataclass(frozen=True)
class ConfigPoint:
    set_tag: str        # "center", "A" or "B"
    angular_index: int  # multiples of 60 degrees; B is offset by the cross angle
    radius: int


@dataclass
class AbstractConfig:
    """Two hexagons of radius 2 about a shared centre, B rotated by ``acos(cross_cos)``.

    Ids: 1 is the centre, 2..7 are A_0..A_5, 8..13 are B_0..B_5.
    """

    points: list[ConfigPoint]
    cross_cos: Fraction
    edges: list[tuple[int, int]] = field(default_factory=list)
    distance4_pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ids(self) -> range:
        return range(1, len(self.points) + 1)

    def a_id(self, k: int) -> int:
        return 2 + k % 6

    def b_id(self, k: int) -> int:
        return 8 + k % 6

    def squared_distance(self, i: int, j: int) -> QuadraticSurd:
        p, q = self.points[i - 1], self.points[j - 1]
        if p.radius == 0 or q.radius == 0:
            return QuadraticSurd(Fraction(max(p.radius, q.radius) ** 2))
        m = (q.angular_index - p.angular_index) % 6
        c = self.cross_cos
        if p.set_tag == q.set_tag:
            return QuadraticSurd(8 - 8 * _COS60[m])
        if p.set_tag == "B":
            m = (-m) % 6
        # cos(60m + t) = cos60m*c - sin60m*sqrt(1-c^2); the second product is sqrt(3(1-c^2))/2
        radicand = 3 * (1 - c * c)
        return QuadraticSurd(8 - 8 * _COS60[m] * c, Fraction(4 * _SIN60_SIGN[m]), radicand)


def build_two_lattice_config(cross_cos=Fraction(7, 8)) -> AbstractConfig:
    cross_cos = Fraction(cross_cos)
    pts = [ConfigPoint("center", 0, 0)]
    pts += [ConfigPoint("A", k, 2) for k in range(6)]
    pts += [ConfigPoint("B", k, 2) for k in range(6)]
    cfg = AbstractConfig(pts, cross_cos)
    for i, j in itertools.combinations(cfg.ids, 2):
        d = cfg.squared_distance(i, j)
        if d.equals_rational(1):
            cfg.edges.append((i, j))
        elif d.equals_rational(16):
            cfg.distance4_pairs.append((i, j))
    return cfg


def spindle_identities() -> list[tuple[str, Fraction, bool]]:
    """Exact chord identities behind the last two steps of the argument."""
    checks = [
        ("8 - 8*(7/8) == 1  (radius-2 hexagons rotated by acos(7/8))",
         8 - 8 * Fraction(7, 8), 1),
        ("2*4^2 - 2*4^2*(31/32) == 1  (distance-4 pairs rotated by acos(31/32))",
         2 * 16 - 2 * 16 * Fraction(31, 32), 1),
    ]
    return [(label, value, value == want) for label, value, want in checks]
