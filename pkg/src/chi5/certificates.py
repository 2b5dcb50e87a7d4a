"""Colouring diagrams, their text format and a strict stand-alone verifier.

A diagram is a refutation tree.  Root nodes carry the preset colouring.
Every other node names a vertex and, per colour, the earlier nodes (roots or
ancestors on its path) that already use that colour at unit distance.  A Stem
has one colour left, a Branch several (one child chain per colour), and an
End none.

The verifier only looks at coordinates: adjacency is re-decided with
``is_unit`` on vertex differences, never through a graph's adjacency lists.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from .coloring import COLORS, RootColoringClass
from .ring import RingVector, is_unit, parse_vector

ROOT, STEM, BRANCH, END = "root", "stem", "branch", "end"

REASONS = ("structure", "unknown vertex", "root class", "root", "ancestor", "color",
           "distance", "stem", "branch coverage", "end", "leaf", "repeat vertex")


@dataclass
class DiagramNode:
    ordinal: int
    vertex: RingVector
    kind: str
    parent: int | None = None
    ports: dict[int, tuple[int, ...]] = field(default_factory=dict)
    out_color: int | None = None
    via: int | None = None  # colour the parent Branch takes on this child's path

    def justified(self) -> set[int]:
        return {c for c, js in self.ports.items() if js}

    def free_colors(self) -> list[int]:
        return [c for c in COLORS if not self.ports.get(c)]


@dataclass
class Diagram:
    name: str
    root_label: str
    nodes: list[DiagramNode]
    root_class: RootColoringClass | None = None

    def by_ordinal(self) -> dict[int, DiagramNode]:
        return {n.ordinal: n for n in self.nodes}

    def roots(self) -> list[DiagramNode]:
        return [n for n in self.nodes if n.kind == ROOT]

    def children(self) -> dict[int, list[DiagramNode]]:
        out: dict[int, list[DiagramNode]] = {}
        for n in self.nodes:
            if n.parent is not None:
                out.setdefault(n.parent, []).append(n)
        return out


@dataclass(frozen=True)
class DiagramStats:
    nodes_total: int
    root_nodes: int
    end_nodes: int
    vertices_used: int
    elementary_checks: int

    def __str__(self):
        return (f"nodes {self.nodes_total}, roots {self.root_nodes}, ends {self.end_nodes}, "
                f"vertices {self.vertices_used}, checks {self.elementary_checks}")


@dataclass
class VerificationReport:
    verdict: str  # "accepted" or "rejected"
    failures: list[tuple[int, str]]
    stats: DiagramStats

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"

    def reasons(self) -> set[str]:
        return {r for _, r in self.failures}


def diagram_stats(d: Diagram) -> DiagramStats:
    total = len(d.nodes)
    roots = sum(n.kind == ROOT for n in d.nodes)
    return DiagramStats(total, roots, sum(n.kind == END for n in d.nodes),
                        len({n.vertex for n in d.nodes}), total - roots)


# ------------------------------------------------------------------ verifier

def verify_diagram(g, d: Diagram) -> VerificationReport:
    """Check every clause and collect all failures; never raises on bad input."""
    fails: list[tuple[int, str]] = []

    def bad(o, reason):
        if (o, reason) not in fails:
            fails.append((o, reason))

    nodes: dict[int, DiagramNode] = {}
    for n in d.nodes:
        if n.ordinal in nodes or not isinstance(n.ordinal, int) or n.ordinal < 1:
            bad(n.ordinal, "structure")
            continue
        nodes[n.ordinal] = n
        if n.kind not in (ROOT, STEM, BRANCH, END):
            bad(n.ordinal, "structure")
        if g is not None and g.get_id(n.vertex) is None:
            bad(n.ordinal, "unknown vertex")
        if any(c not in COLORS for c in n.ports):
            bad(n.ordinal, "structure")

    roots = [n for n in nodes.values() if n.kind == ROOT]
    first_non_root = min((o for o, n in nodes.items() if n.kind != ROOT), default=None)
    for r in roots:
        if r.ports or r.parent is not None or r.out_color not in COLORS:
            bad(r.ordinal, "structure")
        if first_non_root is not None and r.ordinal > first_non_root:
            bad(r.ordinal, "structure")

    # (1) roots reproduce the class and are properly coloured
    rc = d.root_class
    if rc is None or rc.label != d.root_label:
        bad(0, "root class")
    else:
        want = rc.points()
        have = {r.vertex: r.out_color for r in roots}
        if want != have or len(roots) != len(want):
            for r in roots:
                if want.get(r.vertex) != r.out_color:
                    bad(r.ordinal, "root class")
            if set(want) - set(have) or len(roots) != len(have):
                bad(0, "root class")
    for i, r in enumerate(roots):
        for s in roots[i + 1:]:
            if r.out_color == s.out_color and is_unit(r.vertex - s.vertex):
                bad(s.ordinal, "root")
            if r.vertex == s.vertex:
                bad(s.ordinal, "repeat vertex")
    root_colors = {r.ordinal: r.out_color for r in roots}
    root_vertices = {r.vertex for r in roots}

    # parent links; anything unresolved is a structural failure
    kids: dict[int, list[DiagramNode]] = {}
    tops = []
    for o, n in sorted(nodes.items()):
        if n.kind == ROOT:
            continue
        p = nodes.get(n.parent) if n.parent is not None else None
        if p is None:
            bad(o, "structure")
            continue
        if p.kind == ROOT:
            tops.append(o)
        if p.kind == END:
            bad(o, "structure")
        kids.setdefault(p.ordinal, []).append(n)
    if len(tops) > 1:
        for o in tops[1:]:
            bad(o, "structure")
    if not tops:
        bad(0, "leaf")

    # path context: ordinal -> colour for roots and ancestors, plus path vertices
    ctx_cache: dict[int, tuple[dict[int, int], set] | None] = {}

    def context(o: int):
        if o in ctx_cache:
            return ctx_cache[o]
        ctx_cache[o] = None  # cycle guard
        n = nodes[o]
        p = nodes.get(n.parent)
        if p is None or p.kind == END:
            return None
        if p.kind == ROOT:
            res = (dict(root_colors), set(root_vertices))
        else:
            up = context(p.ordinal)
            if up is None:
                return None
            colors, verts = dict(up[0]), set(up[1])
            if p.kind == STEM:
                col = p.out_color
            else:
                col = n.via
            colors[p.ordinal] = col
            verts.add(p.vertex)
            res = (colors, verts)
        ctx_cache[o] = res
        return res

    for o, n in sorted(nodes.items()):
        if n.kind == ROOT:
            continue
        ctx = context(o)
        if ctx is None:
            bad(o, "structure")
            continue
        colors, verts = ctx
        # (7) no vertex twice on one path
        if n.vertex in verts:
            bad(o, "repeat vertex")
        # (2) port entries
        for c, js in sorted(n.ports.items()):
            for j in js:
                jn = nodes.get(j)
                if jn is None:
                    bad(o, "structure")
                elif j not in colors:
                    bad(o, "ancestor")
                elif colors[j] != c:
                    bad(o, "color")
                elif not is_unit(n.vertex - jn.vertex):
                    bad(o, "distance")
        J = n.justified()
        ch = kids.get(o, [])
        if n.kind == STEM:
            # (3)
            if n.out_color not in COLORS:
                bad(o, "structure")
            elif n.out_color in J:
                bad(o, "color")
            elif len(J) != 3:
                bad(o, "stem")
            if len(ch) > 1:
                bad(o, "structure")
            if any(k.via is not None for k in ch):
                bad(o, "structure")
        elif n.kind == BRANCH:
            # (4)
            free = [c for c in COLORS if c not in J]
            vias = sorted(k.via for k in ch if k.via is not None)
            if len(free) < 2 or vias != free or len(vias) != len(ch):
                bad(o, "branch coverage")
        elif n.kind == END:
            # (5)
            if len(J) != 4:
                bad(o, "end")
            if n.out_color is not None:
                bad(o, "structure")
        # (6) leaves are Ends
        if not ch and n.kind != END:
            bad(o, "leaf")

    fails.sort(key=lambda t: (t[0], REASONS.index(t[1]) if t[1] in REASONS else 99))
    return VerificationReport("rejected" if fails else "accepted", fails, diagram_stats(d))


# --------------------------------------------------------------- text format

def _fmt_list(js: Iterable[int]) -> str:
    js = list(js)
    return ",".join(map(str, js)) if js else "-"


def export_diagram(d: Diagram) -> str:
    lines = [f"DIAGRAM {d.name} ROOTCLASS {d.root_label}"]
    for n in d.nodes:
        if n.kind == ROOT:
            lines.append(f"R {n.ordinal} V {n.vertex} COLOR {n.out_color}")
            continue
        ports = " ".join(f"P{c} {_fmt_list(n.ports.get(c, ()))}" for c in COLORS)
        out = {STEM: str(n.out_color), BRANCH: "BRANCH", END: "END"}.get(n.kind, "?")
        line = f"N {n.ordinal} V {n.vertex} {ports} OUT {out} PARENT {n.parent}"
        if n.via is not None:
            line += f" VIA {n.via}"
        lines.append(line)
    return "\n".join(lines) + "\n"


class DiagramParseError(ValueError):
    pass


_PORT_RE = re.compile(r"^P([1-4])$")


def _parse_list(tok: str) -> tuple[int, ...]:
    if tok == "-":
        return ()
    return tuple(int(x) for x in tok.split(","))


def import_diagram(text: str, root_classes: dict | None = None) -> Diagram:
    """Parse the normative format.  Missing ports read as empty; the result
    still has to go through :func:`verify_diagram` before it means anything."""
    d = None
    expected = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vec = re.search(r"\([^)]*\)", line)
            vtext = vec.group(0) if vec else None
            parts = (line.replace(vtext, "VEC") if vtext else line).split()
            if parts[0] == "DIAGRAM":
                if d is not None or len(parts) != 4 or parts[2] != "ROOTCLASS":
                    raise ValueError("expected one 'DIAGRAM <name> ROOTCLASS <label>' header")
                rc = (root_classes or {}).get(parts[3])
                d = Diagram(parts[1], parts[3], [], rc)
                continue
            if d is None:
                raise ValueError("missing DIAGRAM header")
            ordinal = int(parts[1])
            if ordinal != expected:
                raise ValueError(f"ordinal {ordinal} where {expected} was expected")
            expected += 1
            if parts[2] != "V" or vtext is None:
                raise ValueError("missing vertex")
            v = parse_vector(vtext)
            if parts[0] == "R":
                if len(parts) != 6 or parts[4] != "COLOR":
                    raise ValueError("expected 'R <n> V (a,b,c,d) COLOR <c>'")
                col = int(parts[5])
                if col not in COLORS:
                    raise ValueError(f"colour {col} out of range")
                d.nodes.append(DiagramNode(ordinal, v, ROOT, out_color=col))
                continue
            if parts[0] != "N":
                raise ValueError(f"unknown record {parts[0]!r}")
            ports: dict[int, tuple[int, ...]] = {}
            out = parent = via = None
            k = 4
            while k < len(parts):
                key = parts[k]
                val = parts[k + 1]
                m = _PORT_RE.match(key)
                if m:
                    c = int(m.group(1))
                    if c in ports:
                        raise ValueError(f"port {key} given twice")
                    ports[c] = _parse_list(val)
                elif key == "OUT":
                    out = val
                elif key == "PARENT":
                    parent = int(val)
                elif key == "VIA":
                    via = int(val)
                else:
                    raise ValueError(f"unknown field {key!r}")
                k += 2
            if out is None or parent is None:
                raise ValueError("node line needs OUT and PARENT")
            ports = {c: js for c, js in ports.items() if js}
            if out == "END":
                d.nodes.append(DiagramNode(ordinal, v, END, parent, ports, None, via))
            elif out == "BRANCH":
                d.nodes.append(DiagramNode(ordinal, v, BRANCH, parent, ports, None, via))
            else:
                col = int(out)
                if col not in COLORS:
                    raise ValueError(f"colour {col} out of range")
                d.nodes.append(DiagramNode(ordinal, v, STEM, parent, ports, col, via))
        except (IndexError, ValueError) as exc:
            raise DiagramParseError(f"line {lineno}: {exc}") from None
    if d is None:
        raise DiagramParseError("empty diagram")
    return d


def export_flat(d: Diagram) -> str:
    """Table-style listing: nodes in depth-first order without parent fields.

    Each line is ``<ordinal> <P1> <P2> <P3> <P4> (a,b,c,d)``; roots show zeros
    in their ports and their colour in the port of that colour.
    """
    roots = d.roots()
    lines = [f"FLAT {d.name} ROOTCLASS {d.root_label} ROOTS {len(roots)}"]
    for n in d.nodes:
        if n.kind == ROOT:
            cells = ["0"] * 4
            cells[n.out_color - 1] = "*"
        else:
            cells = [",".join(map(str, n.ports[c])) if n.ports.get(c) else "0" for c in COLORS]
        lines.append(f"{n.ordinal} {' '.join(cells)} {n.vertex}")
    return "\n".join(lines) + "\n"


def import_flat(text: str, root_classes: dict | None = None) -> Diagram:
    """Rebuild parents from a flat listing.

    Kinds follow from the number of empty ports.  The node after an End
    resumes at the most recent Branch that still has an untried colour,
    taking its colours in ascending order.
    """
    d = None
    n_roots = 0
    open_branches: list[list] = []  # [ordinal, remaining colours]
    prev: DiagramNode | None = None
    expected = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            parts = line.split()
            if parts[0] == "FLAT":
                if d is not None or len(parts) != 6 or parts[2] != "ROOTCLASS" or parts[4] != "ROOTS":
                    raise ValueError("expected 'FLAT <name> ROOTCLASS <label> ROOTS <k>'")
                d = Diagram(parts[1], parts[3], [], (root_classes or {}).get(parts[3]))
                n_roots = int(parts[5])
                continue
            if d is None:
                raise ValueError("missing FLAT header")
            ordinal = int(parts[0])
            if ordinal != expected:
                raise ValueError(f"ordinal {ordinal} where {expected} was expected")
            expected += 1
            cells, v = parts[1:5], parse_vector(" ".join(parts[5:]))
            if len(cells) != 4:
                raise ValueError("expected four port cells")
            if ordinal <= n_roots:
                if cells.count("*") != 1 or any(x not in ("0", "*") for x in cells):
                    raise ValueError("root line needs exactly one '*' colour cell")
                node = DiagramNode(ordinal, v, ROOT, out_color=cells.index("*") + 1)
                d.nodes.append(node)
                prev = node
                continue
            ports = {c: tuple(int(x) for x in cell.split(","))
                     for c, cell in zip(COLORS, cells) if cell != "0"}
            free = [c for c in COLORS if c not in ports]
            if prev is None:
                raise ValueError("no root lines")
            via = None
            if prev.kind == END:
                while open_branches and not open_branches[-1][1]:
                    open_branches.pop()
                if not open_branches:
                    raise ValueError("node follows a finished tree")
                parent = open_branches[-1][0]
                via = open_branches[-1][1].pop(0)
            elif prev.kind == BRANCH:
                parent = prev.ordinal
                via = open_branches[-1][1].pop(0)
            else:
                parent = prev.ordinal
            if not free:
                node = DiagramNode(ordinal, v, END, parent, ports, None, via)
            elif len(free) == 1:
                node = DiagramNode(ordinal, v, STEM, parent, ports, free[0], via)
            else:
                node = DiagramNode(ordinal, v, BRANCH, parent, ports, None, via)
                open_branches.append([ordinal, list(free)])
            d.nodes.append(node)
            prev = node
        except (IndexError, ValueError) as exc:
            raise DiagramParseError(f"line {lineno}: {exc}") from None
    if d is None:
        raise DiagramParseError("empty diagram")
    return d


def depth_first(d: Diagram) -> Diagram:
    """Same diagram with nodes renumbered in depth-first order, branch children
    visited by ascending colour.  The flat format relies on this order."""
    kids = d.children()
    order: list[DiagramNode] = list(d.roots())
    root_ids = {r.ordinal for r in order}
    top = [n for n in d.nodes if n.kind != ROOT and n.parent in root_ids]
    stack = list(reversed(top))
    while stack:
        n = stack.pop()
        order.append(n)
        stack.extend(sorted(kids.get(n.ordinal, []), key=lambda k: (k.via or 0), reverse=True))
    return renumber(d, order)


def renumber(d: Diagram, order: list[DiagramNode]) -> Diagram:
    new = {n.ordinal: i for i, n in enumerate(order, start=1)}
    nodes = []
    for n in order:
        nodes.append(replace(
            n, ordinal=new[n.ordinal],
            parent=None if n.parent is None else new.get(n.parent, n.parent),
            ports={c: tuple(sorted(new.get(j, j) for j in js)) for c, js in sorted(n.ports.items())}))
    return Diagram(d.name, d.root_label, nodes, d.root_class)


# ----------------------------------------------------------------- mutations

MUTATIONS = {
    "recolor": "color",
    "drop justifier": "end",
    "reroute port": "distance",
    "drop branch child": "branch coverage",
    "truncate path": "leaf",
}


def _copy(d: Diagram) -> Diagram:
    return Diagram(d.name, d.root_label, [replace(n, ports=dict(n.ports)) for n in d.nodes], d.root_class)


def _path_colors(d: Diagram, o: int) -> dict[int, int]:
    nodes = d.by_ordinal()
    out = {r.ordinal: r.out_color for r in d.roots()}
    n = nodes[o]
    while n.parent is not None and nodes[n.parent].kind != ROOT:
        p = nodes[n.parent]
        out[p.ordinal] = p.out_color if p.kind == STEM else n.via
        n = p
    return out


def _subtree(d: Diagram, o: int) -> set[int]:
    kids = d.children()
    out, stack = set(), [o]
    while stack:
        x = stack.pop()
        out.add(x)
        stack.extend(k.ordinal for k in kids.get(x, []))
    return out


def mutate(d: Diagram, category: str, rng: random.Random) -> Diagram | None:
    """One random single-point corruption of ``d`` in the given category,
    or None when the diagram offers no site for it."""
    m = _copy(d)
    nodes = m.by_ordinal()
    kids = m.children()
    if category == "recolor":
        sites = [n for n in m.nodes if n.kind == STEM]
        if not sites:
            return None
        n = rng.choice(sites)
        # the new colour is one the stem's own ports rule out
        n.out_color = rng.choice([c for c in COLORS if c != n.out_color])
        return m
    if category == "drop justifier":
        sites = [(n, c) for n in m.nodes if n.kind == END for c in n.ports]
        if not sites:
            return None
        n, c = rng.choice(sites)
        # ports of a thinned diagram hold one justifier; clearing the whole
        # port also covers ports that cite several
        del n.ports[c]
        return m
    if category == "reroute port":
        sites = []
        for n in m.nodes:
            if n.kind == ROOT:
                continue
            pc = _path_colors(m, n.ordinal)
            for c, js in n.ports.items():
                alts = [j for j, col in pc.items() if col == c and j not in js
                        and not is_unit(n.vertex - nodes[j].vertex)]
                for j in js:
                    for a in alts:
                        sites.append((n, c, j, a))
        if not sites:
            return None
        n, c, j, a = rng.choice(sites)
        n.ports[c] = tuple(sorted(a if x == j else x for x in n.ports[c]))
        return m
    if category == "drop branch child":
        sites = [k for n in m.nodes if n.kind == BRANCH for k in kids.get(n.ordinal, [])]
        if not sites:
            return None
        k = rng.choice(sites)
        gone = _subtree(m, k.ordinal)
        m.nodes = [n for n in m.nodes if n.ordinal not in gone]
        return m
    if category == "truncate path":
        # cut below a stem so that it becomes a non-End leaf
        sites = [n for n in m.nodes if n.kind == STEM and kids.get(n.ordinal)]
        if not sites:
            return None
        n = rng.choice(sites)
        gone = _subtree(m, n.ordinal) - {n.ordinal}
        m.nodes = [x for x in m.nodes if x.ordinal not in gone]
        return m
    raise ValueError(f"unknown mutation category {category!r}")
