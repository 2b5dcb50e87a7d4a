"""Lattice lemmas: from non-mono triples to the spindle contradiction.

Each lemma returns a LemmaResult carrying its witness colourings; a later
lemma reads only the witness of the one before it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache

from .coloring import (COLOR_PERMS, MonoSet, NonMonoSet, constraint_group,
                       enumerate_colorings, relabel_first_occurrence)
from .graphs import (AXIAL_DIRECTIONS, HEX_RING, build_lattice_patch, build_t_golomb,
                     build_two_lattice_config, spindle_identities)

ESTABLISHED, FAILED = "established", "failed"


@dataclass
class LemmaResult:
    lemma: str
    status: str
    parameters: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    witness_graph: str = ""
    witness: list[tuple[int, ...]] = field(default_factory=list)  # colourings in id order
    notes: list[str] = field(default_factory=list)

    @property
    def established(self) -> bool:
        return self.status == ESTABLISHED


def format_lemma(res: LemmaResult) -> str:
    lines = [f"LEMMA {res.lemma} STATUS {res.status}"]
    lines += [f"PARAM {k} {v}" for k, v in res.parameters.items()]
    lines += [f"COUNT {k} {v}" for k, v in res.counts.items()]
    lines += [f"NOTE {n}" for n in res.notes]
    for k, col in enumerate(res.witness, start=1):
        lines.append(f"ROOTCLASS {res.lemma}-{k} GRAPH {res.witness_graph}")
        lines += [f"ASSIGN {i} {c}" for i, c in enumerate(col, start=1)]
    return "\n".join(lines) + "\n"


def parse_lemma(text: str) -> LemmaResult:
    res = None
    cur: list[int] | None = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "LEMMA":
                name, _, status = rest.split()
                res = LemmaResult(name, status)
            elif key == "PARAM":
                k, v = rest.split(" ", 1)
                res.parameters[k] = int(v) if v.lstrip("-").isdigit() else v
            elif key == "COUNT":
                k, v = rest.split()
                res.counts[k] = int(v)
            elif key == "NOTE":
                res.notes.append(rest)
            elif key == "ROOTCLASS":
                res.witness_graph = rest.split()[-1]
                cur = []
                res.witness.append(cur)
            elif key == "ASSIGN":
                i, c = map(int, rest.split())
                if i != len(cur) + 1:
                    raise ValueError("witness ASSIGN lines must list ids 1, 2, ... in order")
                cur.append(c)
            else:
                raise ValueError(f"unknown record {key!r}")
        except (AttributeError, TypeError, ValueError) as exc:
            raise ValueError(f"line {n}: {exc}") from None
    if res is None:
        raise ValueError("no LEMMA header")
    res.witness = [tuple(w) for w in res.witness]
    return res


# ------------------------------------------------------------ wheel types

def mono_opposite_pairs(g, col) -> int:
    """Opposite hexagon pairs of the wheel (v and -v) sharing a colour."""
    ring = [i for i in g.ids if i != 1]
    return sum(col[i - 1] == col[j - 1] for i, j in itertools.combinations(ring, 2)
               if g.vertex(i) == -g.vertex(j))


def lemma_wheel_types() -> LemmaResult:
    w = build_t_golomb(0)
    t1, t2 = (2, 3, 4), (5, 6, 7)
    nonmono = [NonMonoSet(*t1), NonMonoSet(*t2)]
    classes = enumerate_colorings(w, nonmono, constraint_group(w, nonmono))
    mono = [MonoSet(*t1)]
    mono_classes = enumerate_colorings(w, mono, constraint_group(w, mono))
    res = LemmaResult("wheel_types", FAILED, witness_graph=w.name)
    res.counts = {"classes": len(classes), "mono_classes": len(mono_classes)}
    res.witness = [c.canonical for c in classes]
    for k, c in enumerate(classes, start=1):
        col = c.canonical
        two_col = all(len({col[i - 1] for i in t}) == 2 for t in (t1, t2))
        res.notes.append(f"class {k}: {''.join(map(str, col))} mono opposite pairs "
                         f"{mono_opposite_pairs(w, col)}{' both triples two-coloured' if two_col else ''}")
    if len(classes) == 2 and len(mono_classes) == 2:
        res.status = ESTABLISHED
    return res


# ---------------------------------------------------------- lattice patches

@cache
def patch_classes(r: int) -> tuple[tuple[int, ...], ...]:
    """Canonical colourings of the radius-r patch with every sqrt(3)-triple non-mono."""
    p = build_lattice_patch(r)
    cons = [NonMonoSet(*t) for t in p.sqrt3_triples]
    return tuple(c.canonical for c in enumerate_colorings(p, cons, p.symmetry_permutations()))


def _segments(p, ids, d):
    """Maximal runs of ``ids`` along direction ``d``, each in order."""
    pts = {p.point(i) for i in ids}
    out = []
    for q in sorted(pts):
        if (q[0] - d[0], q[1] - d[1]) in pts:
            continue
        seg = []
        while q in pts:
            seg.append(p.id_of(q))
            q = (q[0] + d[0], q[1] + d[1])
        out.append(seg)
    return out


def alternating_direction(p, col, ids):
    """First axial direction in which every run of ``ids`` alternates two colours."""
    for d in AXIAL_DIRECTIONS:
        ok = True
        for seg in _segments(p, ids, d):
            cs = [col[i - 1] for i in seg]
            if len(set(cs)) > 2 or any(cs[k] != cs[k + 2] for k in range(len(cs) - 2)):
                ok = False
                break
        if ok:
            return d
    return None


def forced_extension_violations(p, col) -> tuple[int, int]:
    """(checks, violations) of the rule: around an interior vertex whose wheel
    has exactly one mono opposite pair, the lattice vertex one step further
    along that line has the centre's colour."""
    checks = bad = 0
    for m in p.interior():
        c = p.point(m)
        ring = [col[p.id_of((c[0] + a, c[1] + b)) - 1] for a, b in HEX_RING]
        mono = [k for k in range(3) if ring[k] == ring[k + 3]]
        if len(mono) != 1:
            continue
        d = HEX_RING[mono[0]]
        for s in (2, -2):
            j = p.get_id((c[0] + s * d[0], c[1] + s * d[1]))
            if j is not None:
                checks += 1
                bad += col[j - 1] != col[m - 1]
    return checks, bad


def lemma_lattice_lines(r: int) -> LemmaResult:
    if r < 2:
        raise ValueError("patch radius must be >= 2")
    p = build_lattice_patch(r)
    classes = patch_classes(r)
    interior = p.interior()
    res = LemmaResult(f"lattice_lines_r{r}", FAILED, {"radius": r}, witness_graph=p.name)
    lines_bad, checks, viol = [], 0, 0
    for col in classes:
        if alternating_direction(p, col, interior) is None:
            lines_bad.append(col)
        c, b = forced_extension_violations(p, col)
        checks += c
        viol += b
    res.counts = {"classes": len(classes), "line_failures": len(lines_bad),
                  "forced_checks": checks, "forced_violations": viol}
    if lines_bad or viol:
        res.witness = list(lines_bad[:5])
        res.notes.append("counterexample colourings attached")
    else:
        res.status = ESTABLISHED
    return res


# ----------------------------------------------------------- doubled wheel

DOUBLED_POINTS = ((0, 0),) + tuple((2 * a, 2 * b) for a, b in HEX_RING)


def _ring_images(col):
    c0, ring = col[0], list(col[1:])
    for k in range(6):
        for flip in (False, True):
            r = ring[::-1] if flip else ring
            r = r[k:] + r[:k]
            yield (c0,) + tuple(r)


def canonical_doubled(col) -> tuple[int, ...]:
    return min(relabel_first_occurrence(x) for x in _ring_images(col))


def doubled_classes(r: int) -> tuple[tuple[int, ...], ...]:
    p = build_lattice_patch(r)
    ids = [p.id_of(q) for q in DOUBLED_POINTS]
    return tuple(sorted({canonical_doubled(tuple(col[i - 1] for i in ids)) for col in patch_classes(r)}))


def lemma_doubled_wheel(r: int = 2, max_radius: int = 4) -> LemmaResult:
    """Restrictions to the centre and the six points at distance 2.

    The class set is taken at the first radius where it agrees with the next
    radius up; if that never happens by ``max_radius`` the lemma fails.
    """
    if r < 2:
        raise ValueError("patch radius must be >= 2")
    seen = {}
    used = None
    for rad in range(r, max_radius):
        seen.setdefault(rad, doubled_classes(rad))
        seen[rad + 1] = doubled_classes(rad + 1)
        if seen[rad] == seen[rad + 1]:
            used = rad
            break
    res = LemmaResult("doubled_wheel", FAILED, {"start_radius": r, "max_radius": max_radius},
                      witness_graph="doubled-wheel")
    for rad, cls in sorted(seen.items()):
        res.counts[f"classes_r{rad}"] = len(cls)
    if used is None:
        res.notes.append(f"class set did not stabilise by radius {max_radius}")
        return res
    classes = seen[used]
    res.parameters["radius"] = used
    res.witness = list(classes)
    two_col = all(len(set(c)) <= 2 for c in seen[used] + seen[used + 1])
    res.counts["classes"] = len(classes)
    res.notes.append("points: centre, then 2*e^(i*k*pi/3) for k = 0..5")
    res.notes.append(f"stable between radius {used} and {used + 1}")
    if not two_col:
        res.notes.append("a restriction uses more than two colours")
    if two_col and len(classes) == 3:
        res.status = ESTABLISHED
    return res


# ------------------------------------------------------------ two lattices

def _config_group(cfg):
    """Rotations of both hexagons together, and the swap A_k <-> B_-k; each
    permutation is checked against the exact edge set."""
    perms = []
    for k in range(6):
        for swap in (False, True):
            p = [0, 1]
            for tag, f in (("A", cfg.a_id), ("B", cfg.b_id)):
                for i in range(6):
                    if not swap:
                        p.append(f(i + k))
                    else:
                        p.append((cfg.b_id if tag == "A" else cfg.a_id)(-(i + k)))
            perms.append(tuple(p))
    edges = {frozenset(e) for e in cfg.edges}
    for p in perms:
        if {frozenset((p[i], p[j])) for i, j in cfg.edges} != edges:
            raise AssertionError("configuration map does not preserve the unit edges")
    return perms


def lemma_two_lattices(doubled: LemmaResult) -> LemmaResult:
    res = LemmaResult("two_lattices", FAILED, witness_graph="two-lattice")
    if not doubled.established or not doubled.witness:
        res.notes.append("needs an established doubled_wheel witness")
        return res
    cfg = build_two_lattice_config()
    members = set()
    for cl in doubled.witness:
        for img in _ring_images(cl):
            for perm in COLOR_PERMS:
                members.add(tuple(perm[c - 1] for c in img))
    members = sorted(members)
    valid = []
    for a in members:
        for b in members:
            if a[0] != b[0]:
                continue
            col = a + b[1:]
            if all(col[i - 1] != col[j - 1] for i, j in cfg.edges):
                valid.append(col)
    group = _config_group(cfg)
    classes = set()
    for col in valid:
        best = None
        for p in group:
            img = [0] * 13
            for i in range(13):
                img[p[i + 1] - 1] = col[i]
            cand = relabel_first_occurrence(img)
            if best is None or cand < best:
                best = cand
        classes.add(best)
    classes = sorted(classes)
    non_mono = sum(1 for col in valid for i, j in cfg.distance4_pairs if col[i - 1] != col[j - 1])
    res.counts = {"members": len(members), "valid": len(valid), "classes": len(classes),
                  "cross_edges": len(cfg.edges), "distance4_pairs": len(cfg.distance4_pairs),
                  "non_mono_distance4": non_mono}
    res.parameters = {"cross_cos": str(cfg.cross_cos)}
    res.witness = classes
    res.notes.append("ids: 1 centre, 2..7 first hexagon, 8..13 second hexagon")
    if len(classes) == 2 and non_mono == 0 and len(cfg.distance4_pairs) == 6:
        res.status = ESTABLISHED
    return res


# ---------------------------------------------------------------- spindle

def rotation_chord_sq(radius_sq, cos) -> Fraction:
    """Squared distance between a point at squared radius ``radius_sq`` and its
    rotation by an angle with the given cosine."""
    return 2 * Fraction(radius_sq) * (1 - Fraction(cos))


def lemma_spindle(two: LemmaResult) -> LemmaResult:
    res = LemmaResult("spindle", FAILED)
    if not two.established or not two.witness:
        res.notes.append("needs an established two_lattices witness")
        return res
    cfg = build_two_lattice_config()
    for col in two.witness:
        if any(col[i - 1] != col[j - 1] for i, j in cfg.distance4_pairs):
            res.notes.append("a witness colouring has a non-mono distance-4 pair")
            return res
    ids = spindle_identities()
    for label, value, ok in ids:
        res.notes.append(f"{label}: {value} {'ok' if ok else 'FAILED'}")
    chords = {"hexagon_chord_sq": rotation_chord_sq(4, Fraction(7, 8)),
              "spindle_chord_sq": rotation_chord_sq(16, Fraction(31, 32))}
    res.parameters = {k: str(v) for k, v in chords.items()}
    res.notes += [
        "every pair of points at distance 4 is mono",
        "P, Q1 at distance 4 and P, Q2 at distance 4 with angle Q1 P Q2 = acos(31/32)",
        "so colour(Q1) = colour(P) = colour(Q2) while |Q1 Q2| = 1",
    ]
    if all(ok for _, _, ok in ids) and all(v == 1 for v in chords.values()):
        res.status = ESTABLISHED
    return res
