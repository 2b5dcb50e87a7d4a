"""Partial 4-colourings, symmetric enumeration and the root-colouring case split."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import UnitDistanceGraph, build_t_golomb, graph_by_name
from .ring import GROUP, IDENTITY, SymmetryElement, compose

COLORS = (1, 2, 3, 4)
COLOR_PERMS: tuple[tuple[int, ...], ...] = tuple(itertools.permutations(COLORS))

PartialColoring = dict  # vertex id -> colour in 1..4


class CoverageError(RuntimeError):
    pass


def is_proper(g, pc: PartialColoring) -> bool:
    ids = set(g.ids)
    for v in pc:
        if v not in ids:
            raise KeyError(f"vertex {v} not in graph {getattr(g, 'name', '?')}")
    return all(pc[u] != pc[w] for u in pc for w in g.neighbors(u) if w in pc)


def allowed_colors(g, pc: PartialColoring, v: int) -> set[int]:
    if v in pc:
        raise ValueError(f"vertex {v} is already coloured")
    return set(COLORS) - {pc[w] for w in g.neighbors(v) if w in pc}


@dataclass(frozen=True)
class ColoringConstraint:
    kind: str  # "mono", "nonmono" or "fixed"
    vertices: tuple[int, ...]
    color: int | None = None

    def violated(self, pc: PartialColoring) -> bool:
        """True once the assigned part of ``pc`` already breaks the constraint."""
        if self.kind == "fixed":
            v = self.vertices[0]
            return v in pc and pc[v] != self.color
        seen = [pc[v] for v in self.vertices if v in pc]
        if self.kind == "mono":
            return len(set(seen)) > 1
        if self.kind == "nonmono":
            return len(seen) == len(self.vertices) and len(set(seen)) == 1
        raise ValueError(f"unknown constraint kind {self.kind!r}")


def MonoSet(*vertices) -> ColoringConstraint:
    return ColoringConstraint("mono", tuple(vertices))


def NonMonoSet(*vertices) -> ColoringConstraint:
    return ColoringConstraint("nonmono", tuple(vertices))


def Fixed(vertex: int, color: int) -> ColoringConstraint:
    return ColoringConstraint("fixed", (vertex,), color)


# ------------------------------------------------------------------ symmetry

def ring_symmetries(g: UnitDistanceGraph, fixed_sets: Iterable[Iterable[int]] = ()):
    """Group elements that map the vertex set of ``g`` onto itself and each
    of ``fixed_sets`` onto itself, with the induced vertex permutations.

    Permutations are tuples indexed by vertex id (slot 0 unused).  Elements
    inducing the same permutation are collapsed to the first one.
    """
    fixed = [frozenset(s) for s in fixed_sets]
    out = {}
    for s in GROUP:
        perm = [0]
        for v in g.vertices:
            j = g.get_id(s(v))
            if j is None:
                break
            perm.append(j)
        else:
            perm = tuple(perm)
            if all(frozenset(perm[i] for i in fs) == fs for fs in fixed):
                out.setdefault(perm, s)
    return [(s, p) for p, s in out.items()]


def constraint_group(g: UnitDistanceGraph, constraints: Sequence[ColoringConstraint]):
    """Vertex permutations of ``g`` (from the ring symmetries) that map the
    constraint family onto itself."""
    family = {(c.kind, frozenset(c.vertices), c.color) for c in constraints}
    perms = []
    for _, p in ring_symmetries(g):
        if {(k, frozenset(p[i] for i in vs), col) for k, vs, col in family} == family:
            perms.append(p)
    return perms


def relabel_first_occurrence(colors: Sequence[int]) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(c, len(seen) + 1) for c in colors)


def canonical_form(colors: Sequence[int], perms: Sequence[Sequence[int]] = (),
                   color_perms: bool = True) -> tuple[int, ...]:
    """Least image of a full colouring (listed in id order) under the group.

    ``perms`` are vertex permutations indexed by id with slot 0 unused; the
    identity is always included.  With ``color_perms`` the colour relabelling
    is folded in, since first-occurrence relabelling is the lexicographic
    minimum over colour permutations.
    """
    n = len(colors)
    best = relabel_first_occurrence(colors) if color_perms else tuple(colors)
    for p in perms:
        img = [0] * n
        for i in range(n):
            img[p[i + 1] - 1] = colors[i]
        cand = relabel_first_occurrence(img) if color_perms else tuple(img)
        if cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class ColoringClass:
    canonical: tuple[int, ...]
    symmetries_used: str
    members: int = 1  # colourings found by the search that fall in this class

    def as_coloring(self) -> PartialColoring:
        return {i: c for i, c in enumerate(self.canonical, start=1)}


def enumerate_colorings(g, constraints: Sequence[ColoringConstraint] = (),
                        group: Sequence[Sequence[int]] | None = None,
                        color_perms: bool = True) -> list[ColoringClass]:
    """All proper 4-colourings of ``g`` meeting ``constraints``, up to symmetry.

    ``group`` lists vertex permutations (see :func:`canonical_form`); None means
    the trivial group.  With ``color_perms`` the search only emits colourings
    whose colours appear in first-occurrence order, which is safe because
    mono/non-mono constraints are colour-blind.
    """
    ids = list(g.ids)
    if color_perms and any(c.kind == "fixed" for c in constraints):
        raise ValueError("fixed-colour constraints are not invariant under colour permutations")
    group = list(group or [])
    pos = {v: k for k, v in enumerate(ids)}
    # a constraint is checked when its last vertex (in search order) gets coloured
    due: dict[int, list[ColoringConstraint]] = {v: [] for v in ids}
    partial: dict[int, list[ColoringConstraint]] = {v: [] for v in ids}
    for c in constraints:
        for v in c.vertices:
            partial[v].append(c)
        due[max(c.vertices, key=pos.__getitem__)].append(c)
    earlier = {v: [w for w in g.neighbors(v) if pos[w] < pos[v]] for v in ids}

    pc: PartialColoring = {}
    counts: dict[tuple[int, ...], int] = {}

    def rec(k: int, used: int):
        if k == len(ids):
            key = canonical_form([pc[v] for v in ids], group, color_perms)
            counts[key] = counts.get(key, 0) + 1
            return
        v = ids[k]
        top = min(used + 1, 4) if color_perms else 4
        for col in range(1, top + 1):
            if any(pc[w] == col for w in earlier[v]):
                continue
            pc[v] = col
            if not any(c.violated(pc) for c in partial[v]):
                rec(k + 1, max(used, col))
            del pc[v]

    rec(0, 0)
    desc = f"{len(group) or 1} vertex permutations x {'24 colour permutations' if color_perms else 'fixed colours'}"
    return [ColoringClass(key, desc, counts[key]) for key in sorted(counts)]


# --------------------------------------------------------- root colourings

# Golomb-graph colourings (vertices 1..10) of the four non-isomorphic cases.
GOLOMB_ROWS = {1: "4111222234", 2: "4111223234", 3: "4111223342", 4: "4111223423"}
# Colours of vertices 11..13 indexed by the second label digit; row 1 relabels two columns.
EXTENSION_COLUMNS = ("132", "134", "142", "312", "314", "341", "342", "412", "431", "432")
ROW1_OVERRIDES = {2: "143", 7: "413"}

MONO_TRIPLE = (2, 3, 4)


@dataclass(frozen=True)
class Cover:
    """Original label ``label`` is handled by a class via ``element`` and a colour map.

    ``color_perm[c - 1]`` is the class colour of original colour ``c``.
    """

    label: str
    element: SymmetryElement = IDENTITY
    color_perm: tuple[int, ...] = COLORS


@dataclass
class RootColoringClass:
    label: str
    graph: UnitDistanceGraph
    coloring: PartialColoring
    covers: tuple[Cover, ...] = ()

    def points(self) -> dict:
        return {self.graph.vertex(i): c for i, c in sorted(self.coloring.items())}

    def color_string(self) -> str:
        return "".join(str(self.coloring[i]) for i in sorted(self.coloring))

    def restricted(self, ids: Iterable[int], label: str) -> "RootColoringClass":
        keep = set(ids)
        return RootColoringClass(label, self.graph,
                                 {i: c for i, c in self.coloring.items() if i in keep})

    def covered_labels(self) -> list[str]:
        return [c.label for c in self.covers]


def extension_label(row: int, triple: str):
    for b, col in enumerate(EXTENSION_COLUMNS):
        if row == 1:
            col = ROW1_OVERRIDES.get(b, col)
        if col == triple:
            return f"R{row}{b}"
    return None


def golomb_classes() -> list[RootColoringClass]:
    g = build_t_golomb(1)
    return [RootColoringClass(f"R{a}", g, {i: int(ch) for i, ch in enumerate(s, start=1)})
            for a, s in GOLOMB_ROWS.items()]


def derive_root_colorings() -> list[RootColoringClass]:
    """Every proper extension of R1..R4 over vertices 11, 12, 13 of the 2-Golomb graph."""
    g = build_t_golomb(2)
    out = []
    for row, s in GOLOMB_ROWS.items():
        base = {i: int(ch) for i, ch in enumerate(s, start=1)}
        if not is_proper(build_t_golomb(1), base):
            raise AssertionError(f"row R{row} is not a proper Golomb colouring")
        found = []
        for t in itertools.product(COLORS, repeat=3):
            pc = dict(base)
            pc.update({11: t[0], 12: t[1], 13: t[2]})
            if not is_proper(g, pc):
                continue
            label = extension_label(row, "".join(map(str, t)))
            if label is None:
                raise AssertionError(f"extension {t} of R{row} has no table label")
            found.append(RootColoringClass(label, g, pc, (Cover(label),)))
        out += sorted(found, key=lambda r: r.label)
    return out


def antipodal_inner_pairs(g: UnitDistanceGraph) -> list[tuple[int, int]]:
    """Pairs of inner-triangle vertices (ids >= 8) that are point reflections of each other."""
    inner = [i for i in g.ids if i >= 8]
    return [(i, j) for i, j in itertools.combinations(inner, 2) if g.vertex(i) == -g.vertex(j)]


def has_mono_antipodal_pair(rc: RootColoringClass) -> bool:
    return any(rc.coloring.get(i) is not None and rc.coloring.get(i) == rc.coloring.get(j)
               for i, j in antipodal_inner_pairs(rc.graph))


# ------------------------------------------------------------------ merging

@dataclass
class MergeResult:
    classes: list[RootColoringClass]
    refuted: list[str]  # labels left to their own quick refutations
    notes: list[str] = field(default_factory=list)

    def label_owner(self) -> dict[str, str]:
        owner = {lab: lab for lab in self.refuted}
        for rc in self.classes:
            for c in rc.covers:
                owner[c.label] = rc.label
        return owner


# Groupings read off the merged cells of the published table: all of row 4
# on vertices 1..10, and R23..R26 on vertices 1..11.
FIXED_MERGE_PLAN = ((10, ("R40", "R41", "R42", "R43", "R44", "R45", "R46", "R47", "R48", "R49")),
                    (11, ("R23", "R24", "R25", "R26")))


def _prefix(rc: RootColoringClass, level: int) -> tuple[int, ...]:
    return tuple(rc.coloring[i] for i in range(1, level + 1))


def _prefix_label(labels: Sequence[str], level: int) -> str:
    if level == 10:
        return labels[0][:2] + "x"
    return f"{labels[0]}-{labels[-1][2:]}"


def derived_merge_plan(roots: Sequence[RootColoringClass], refuted: Iterable[str]):
    """Prefix groups (vertices 1..10, then 1..11) in which every colouring survived
    quick refutation; such a group is refuted as a whole or not at all."""
    refuted = set(refuted)
    plan, taken = [], set()
    for level in (10, 11):
        groups: dict[tuple, list[str]] = {}
        for rc in roots:
            groups.setdefault(_prefix(rc, level), []).append(rc.label)
        for key in sorted(groups):
            labels = groups[key]
            if len(labels) >= 2 and not (set(labels) & (refuted | taken)):
                plan.append((level, tuple(labels)))
                taken |= set(labels)
    return tuple(plan)


def find_isomorphism(src: RootColoringClass, dst: RootColoringClass):
    """A (symmetry, colour map) carrying ``src`` onto ``dst`` on dst's vertices, or None."""
    g = src.graph
    for s, perm in ring_symmetries(g):
        moved = {perm[i]: c for i, c in src.coloring.items()}
        if set(moved) != set(dst.coloring):
            continue
        cmap: dict[int, int] = {}
        ok = True
        for i, c in moved.items():
            want = dst.coloring[i]
            if cmap.setdefault(c, want) != want:
                ok = False
                break
        if ok and len(set(cmap.values())) == len(cmap):
            free = [c for c in COLORS if c not in cmap.values()]
            for c in COLORS:
                if c not in cmap:
                    cmap[c] = free.pop(0)
            return s, tuple(cmap[c] for c in COLORS)
    return None


def merge_root_classes(roots: Sequence[RootColoringClass], refuted: Iterable[str],
                       plan=None) -> MergeResult:
    """Collapse the surviving root colourings into fewer cases.

    Prefix merges keep only vertices 1..level, and the merged class covers every
    label sharing that prefix (quickly refuted ones included).  Remaining classes
    that are isomorphic under the ring symmetries and colour permutations are
    then folded into the first of them.
    """
    refuted = set(refuted)
    by_label = {rc.label: rc for rc in roots}
    if plan is None:
        plan = derived_merge_plan(roots, refuted)
    notes = []
    classes: list[RootColoringClass] = []
    absorbed: set[str] = set()
    for level, labels in plan:
        members = [by_label[lab] for lab in labels]
        prefixes = {_prefix(rc, level) for rc in members}
        if len(prefixes) != 1:
            raise CoverageError(f"merge group {labels} does not share vertices 1..{level}")
        if absorbed & set(labels):
            raise CoverageError(f"merge group {labels} overlaps an earlier group")
        # everything with this prefix must come along, otherwise coverage would be partial
        key = prefixes.pop()
        same = sorted(rc.label for rc in roots if _prefix(rc, level) == key)
        if same != sorted(labels):
            raise CoverageError(f"merge group {labels} misses labels {sorted(set(same) - set(labels))}")
        merged = members[0].restricted(range(1, level + 1), _prefix_label(sorted(labels), level))
        merged.covers = tuple(Cover(lab) for lab in sorted(labels))
        classes.append(merged)
        absorbed |= set(labels)
        notes.append(f"prefix 1..{level}: {' '.join(sorted(labels))} -> {merged.label}")

    for rc in roots:
        if rc.label in refuted or rc.label in absorbed:
            continue
        classes.append(RootColoringClass(rc.label, rc.graph, dict(rc.coloring), (Cover(rc.label),)))

    kept: list[RootColoringClass] = []
    for rc in classes:
        for rep in kept:
            iso = find_isomorphism(rc, rep)
            if iso is None:
                continue
            s, cp = iso
            extra = []
            for c in rc.covers:
                # original -> rc via (c.element, c.color_perm), then rc -> rep via (s, cp)
                extra.append(Cover(c.label, compose(s, c.element),
                                   tuple(cp[c.color_perm[k] - 1] for k in range(4))))
            rep.covers = rep.covers + tuple(extra)
            notes.append(f"isomorphic: {rc.label} -> {rep.label} via sym {s} colours {''.join(map(str, cp))}")
            break
        else:
            kept.append(rc)
    rest = sorted(lab for lab in refuted if lab not in absorbed)
    return MergeResult(kept, rest, notes)


def check_partition(result: MergeResult, labels: Iterable[str]) -> None:
    labels = sorted(labels)
    seen: list[str] = list(result.refuted)
    for rc in result.classes:
        seen += rc.covered_labels()
    if sorted(seen) != labels:
        dup = sorted({x for x in seen if seen.count(x) > 1})
        missing = sorted(set(labels) - set(seen))
        raise CoverageError(f"coverage is not a partition (duplicates {dup}, missing {missing})")


def cover_holds(original: RootColoringClass, target: RootColoringClass, cover: Cover) -> bool:
    """Does the class colouring agree with the transformed original colouring?

    Checked on coordinates, so it needs nothing beyond the two colourings.
    """
    moved = {cover.element(v): cover.color_perm[c - 1] for v, c in original.points().items()}
    return all(moved.get(v) == c for v, c in target.points().items())


# ------------------------------------------------------------- text format

def format_root_class(rc: RootColoringClass) -> str:
    lines = [f"ROOTCLASS {rc.label} GRAPH {rc.graph.name}"]
    lines += [f"ASSIGN {i} {c}" for i, c in sorted(rc.coloring.items())]
    for cv in rc.covers:
        lines.append(f"COVERS {cv.label} SYM {cv.element} PERM {''.join(map(str, cv.color_perm))}")
    return "\n".join(lines) + "\n"


def parse_root_classes(text: str, graphs=None) -> list[RootColoringClass]:
    """Parse one or more ROOTCLASS blocks.  ``graphs`` maps names to graph
    objects; unknown names fall back to the built-in graphs."""
    graphs = graphs or {}
    out: list[RootColoringClass] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "ROOTCLASS":
                if len(parts) != 4 or parts[2] != "GRAPH":
                    raise ValueError("expected 'ROOTCLASS <label> GRAPH <name>'")
                g = graphs.get(parts[3]) or graph_by_name(parts[3])
                out.append(RootColoringClass(parts[1], g, {}))
            elif parts[0] == "ASSIGN":
                v, c = int(parts[1]), int(parts[2])
                if c not in COLORS:
                    raise ValueError(f"colour {c} out of range")
                if v in out[-1].coloring:
                    raise ValueError(f"vertex {v} assigned twice")
                out[-1].coloring[v] = c
            elif parts[0] == "COVERS":
                if len(parts) != 8 or parts[2] != "SYM" or parts[6] != "PERM":
                    raise ValueError("expected 'COVERS <label> SYM r m c PERM abcd'")
                perm = tuple(int(ch) for ch in parts[7])
                if sorted(perm) != list(COLORS):
                    raise ValueError(f"bad colour permutation {parts[7]}")
                out[-1].covers += (Cover(parts[1], SymmetryElement.parse(" ".join(parts[3:6])), perm),)
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (IndexError, ValueError, KeyError) as exc:
            raise ValueError(f"line {n}: {exc}") from None
    return out
