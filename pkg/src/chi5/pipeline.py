"""Both halves of the argument, the proof bundle and its stand-alone re-check."""

from __future__ import annotations

import itertools
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .certificates import (Diagram, VerificationReport, diagram_stats, export_diagram,
                           import_diagram, verify_diagram)
from .coloring import (COLOR_PERMS, FIXED_MERGE_PLAN, CoverageError, MergeResult, MonoSet,
                       RootColoringClass, check_partition, constraint_group, cover_holds,
                       derive_root_colorings, enumerate_colorings, format_root_class,
                       has_mono_antipodal_pair, merge_root_classes, parse_root_classes,
                       ring_symmetries)
from .forestry import (BaseGraphInsufficient, MinimizeBudget, grow, minimize, quick_refute,
                       thin)
from .graphs import build_base_graph, build_t_golomb, check_orbit_table, format_graph, parse_graph
from .lemmas import (LemmaResult, format_lemma, lemma_doubled_wheel, lemma_lattice_lines,
                     lemma_spindle, lemma_two_lattices, lemma_wheel_types, parse_lemma)
from .ring import enumerate_unit_vectors

log = logging.getLogger(__name__)

VERDICT_OK = "chi >= 5"
VERDICT_INCOMPLETE = "incomplete"
MONO_TRIPLE = (2, 3, 4)

# run-level targets the verdict is gated on
MIN_QUICK_REFUTED = 24
MAX_TOTAL_NODES = 20000
MIN_THIN_REDUCTION = 0.25


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = 1
    mutations: int = 0
    max_rounds: int = 0
    sizes: tuple[int, ...] = (200, 300, 481)
    node_cap: int = 20000
    quick_cap: int = 8
    radius: int = 2
    max_radius: int = 4
    jobs: int = 1
    merge_plan: str = "derived"  # or "fixed"

    def budget(self) -> MinimizeBudget:
        return MinimizeBudget(self.restarts, self.mutations, self.sizes, self.seed,
                              self.max_rounds, self.node_cap)

    def manifest_lines(self) -> list[str]:
        return [f"seed {self.seed}",
                f"budget restarts {self.restarts} mutations {self.mutations} rounds {self.max_rounds} "
                f"sizes {','.join(map(str, self.sizes))} node_cap {self.node_cap} quick_cap {self.quick_cap}",
                f"radius {self.radius} max_radius {self.max_radius}",
                f"merge_plan {self.merge_plan}"]


FAST = RunConfig()
DEEP = RunConfig(restarts=16, mutations=6, max_rounds=8)


@dataclass
class CaseCertificate:
    label: str
    root: RootColoringClass
    diagram: Diagram
    report: VerificationReport
    covers: tuple[str, ...]
    raw_nodes: int | None = None  # grown tree before thinning, when one was grown
    kind: str = "class"  # "class" or "quick"


@dataclass
class Part1Result:
    established: bool
    certificates: list[CaseCertificate]
    merge: MergeResult | None
    roots: list[RootColoringClass]
    quick_refuted: list[str]
    counts: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)


@dataclass
class ProofBundle:
    part1: Part1Result
    part2: list[LemmaResult]
    verdict: str
    failing_stage: str | None = None


def case_split_counts() -> dict:
    w, g = build_t_golomb(0), build_t_golomb(1)
    mono = [MonoSet(*MONO_TRIPLE)]
    return {"wheel_mono": len(enumerate_colorings(w, mono, constraint_group(w, mono))),
            "golomb_mono": len(enumerate_colorings(g, mono, constraint_group(g, mono)))}


def foundation_checks(base) -> list[str]:
    """Unit vectors and base graph, re-derived before any case is attempted."""
    fails = []
    units = enumerate_unit_vectors()
    if len(units) != 30 or any(abs(abs(v.to_complex()) - 1) > 1e-9 for v in units):
        fails.append(f"unit vectors: {len(units)} found")
    if len(base) != 481 or base.edge_count() != 2814:
        fails.append(f"base graph has {len(base)} vertices and {base.edge_count()} edges")
    fails += [f"orbit table: {p}" for p in check_orbit_table(base)]
    return fails


def mean_thin_reduction(certs) -> float | None:
    grown = [c for c in certs if c.raw_nodes]
    if not grown:
        return None
    return sum(1 - len(c.diagram.nodes) / c.raw_nodes for c in grown) / len(grown)


def prove_non_mono_triple(base=None, cfg: RunConfig = FAST, progress=None) -> Part1Result:
    """No proper 4-colouring makes a sqrt(3)-triple mono: every root case refuted."""
    base = base or build_base_graph()
    say = progress or (lambda msg: None)
    roots = derive_root_colorings()
    by_label = {r.label: r for r in roots}
    res = Part1Result(False, [], None, roots, [])
    res.counts = case_split_counts()
    res.counts["roots"] = len(roots)
    res.counts["split"] = "/".join(str(sum(r.label[1] == str(a) for r in roots)) for a in range(1, 5))
    res.counts["antipodal_mono"] = sum(has_mono_antipodal_pair(r) for r in roots)
    if (res.counts["wheel_mono"], res.counts["golomb_mono"], len(roots)) != (2, 4, 36) or \
            res.counts["split"] != "6/10/10/10" or res.counts["antipodal_mono"] != 19:
        res.failures.append(f"case split counts {res.counts}")

    quick: dict[str, Diagram] = {}
    for r in roots:
        t = time.perf_counter()
        d = quick_refute(r, base, cfg.quick_cap, name=f"quick-{r.label}")
        say(f"quick {r.label}: {'refuted' if d else 'open'} ({time.perf_counter() - t:.1f}s)")
        if d is not None:
            quick[r.label] = thin(d)
    res.quick_refuted = sorted(quick)
    if len(quick) < MIN_QUICK_REFUTED:
        res.failures.append(f"only {len(quick)} quick refutations")

    plan = FIXED_MERGE_PLAN if cfg.merge_plan == "fixed" else None
    try:
        merge = merge_root_classes(roots, quick, plan)
        check_partition(merge, by_label)
    except CoverageError as exc:
        res.failures.append(f"coverage: {exc}")
        return res
    res.merge = merge

    for lab in merge.refuted:
        d = quick[lab]
        res.certificates.append(CaseCertificate(lab, by_label[lab], d, verify_diagram(base, d),
                                                (lab,), None, "quick"))
    for rc in merge.classes:
        t = time.perf_counter()
        raw = None
        try:
            raw = len(grow(base, rc).nodes)
        except Exception as exc:  # reported below through minimize
            log.debug("plain grow failed for %s: %s", rc.label, exc)
        try:
            d, mlog = minimize(rc, base, cfg.budget(), jobs=cfg.jobs, name=f"class-{rc.label}")
        except BaseGraphInsufficient as exc:
            res.failures.append(str(exc))
            continue
        rep = verify_diagram(base, d)
        say(f"class {rc.label}: {len(d.nodes)} nodes (raw {raw}) {rep.verdict} "
            f"({time.perf_counter() - t:.1f}s) {mlog.summary()}")
        res.certificates.append(CaseCertificate(rc.label, rc, d, rep, tuple(rc.covered_labels()), raw))
    for c in res.certificates:
        if not c.report.accepted:
            res.failures.append(f"{c.label}: diagram rejected {c.report.failures[:3]}")
    total = sum(c.report.stats.elementary_checks for c in res.certificates)
    res.counts["non_root_nodes"] = total
    if total > MAX_TOTAL_NODES:
        res.failures.append(f"{total} non-root nodes in total")
    red = mean_thin_reduction(res.certificates)
    res.counts["thin_reduction"] = "-" if red is None else f"{red:.3f}"
    if red is not None and red < MIN_THIN_REDUCTION:
        res.failures.append(f"mean thinning reduction {red:.3f}")
    res.established = not res.failures
    return res


def run_part2(cfg: RunConfig = FAST) -> list[LemmaResult]:
    out = [lemma_wheel_types(), lemma_lattice_lines(cfg.radius)]
    doubled = lemma_doubled_wheel(cfg.radius, cfg.max_radius)
    used = doubled.parameters.get("radius", cfg.radius)
    for r in range(cfg.radius + 1, used + 1):
        out.append(lemma_lattice_lines(r))
    out.append(doubled)
    two = lemma_two_lattices(doubled)
    out += [two, lemma_spindle(two)]
    return out


def full_proof(cfg: RunConfig = FAST, out_dir=None, progress=None) -> ProofBundle:
    base = build_base_graph()
    pre = foundation_checks(base)
    part1 = prove_non_mono_triple(base, cfg, progress)
    part1.failures[:0] = pre
    part1.established = part1.established and not pre
    part2 = run_part2(cfg) if part1.established else []
    failing = None
    if not part1.established:
        failing = "part1"
    else:
        for lem in part2:
            if not lem.established:
                failing = lem.lemma
                break
    bundle = ProofBundle(part1, part2, VERDICT_INCOMPLETE if failing else VERDICT_OK, failing)
    if out_dir is not None:
        write_bundle(bundle, cfg, out_dir, base)
    return bundle


# ------------------------------------------------------------------ bundle

BRIDGING_NOTE = ("finite patches stand in for the infinite lattice: line alternation and the "
                 "forced-extension rule are checked on interior vertices of each patch radius "
                 "used, and the doubled-wheel classes are taken at the first radius r whose "
                 "class set equals that of radius r+1")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_bundle(bundle: ProofBundle, cfg: RunConfig, out_dir, base=None):
    out = Path(out_dir)
    base = base or build_base_graph()
    p1 = bundle.part1
    _write(out / "graphs" / f"{base.name}.txt", format_graph(base))
    _write(out / "roots" / "all.txt", "".join(format_root_class(r) for r in p1.roots))
    if p1.merge is not None:
        _write(out / "roots" / "classes.txt", "".join(format_root_class(c) for c in p1.merge.classes))
    lines = ["# proof bundle", *cfg.manifest_lines(),
             f"graph {base.name} vertices {len(base)} edges {base.edge_count()} file graphs/{base.name}.txt"]
    c = p1.counts
    lines.append(f"stage case_split wheel_mono {c.get('wheel_mono')} golomb_mono {c.get('golomb_mono')}")
    lines.append(f"stage roots count {c.get('roots')} split {c.get('split')} antipodal_mono {c.get('antipodal_mono')}")
    lines.append(f"stage quick_refute cap {cfg.quick_cap} refuted {len(p1.quick_refuted)} "
                 f"{' '.join(p1.quick_refuted)}")
    if p1.merge is not None:
        for note in p1.merge.notes:
            lines.append(f"merge {note}")
    for cert in p1.certificates:
        rel = f"certs/{cert.label}.txt"
        _write(out / rel, export_diagram(cert.diagram))
        s = cert.report.stats
        raw = "-" if cert.raw_nodes is None else cert.raw_nodes
        lines.append(f"cert {cert.label} kind {cert.kind} file {rel} covers {','.join(cert.covers)} "
                     f"nodes {s.nodes_total} roots {s.root_nodes} ends {s.end_nodes} "
                     f"vertices {s.vertices_used} checks {s.elementary_checks} raw {raw} {cert.report.verdict}")
    lines.append(f"stage part1 non_root_nodes {c.get('non_root_nodes')} thin_reduction {c.get('thin_reduction')}")
    lines.append(f"stage part1 {'established' if p1.established else 'failed'}")
    for f in p1.failures:
        lines.append(f"failure {f}")
    for lem in bundle.part2:
        rel = f"lemmas/{lem.lemma}.txt"
        _write(out / rel, format_lemma(lem))
        counts = " ".join(f"{k}={v}" for k, v in lem.counts.items())
        lines.append(f"lemma {lem.lemma} {lem.status} file {rel} {counts}")
    lines.append(f"assumption {BRIDGING_NOTE}")
    lines.append(f"verdict {bundle.verdict}")
    _write(out / "manifest.txt", "\n".join(lines) + "\n")


@dataclass
class BundleCheck:
    verdict: str
    failures: list[str]
    certificates: int = 0

    @property
    def ok(self) -> bool:
        return self.verdict == VERDICT_OK


def covered_by_certificates(roots: list[RootColoringClass]) -> list[dict]:
    """Colourings of the 2-Golomb graph with a mono sqrt(3)-triple that match
    no certificate root under the ring symmetries and colour permutations."""
    g = build_t_golomb(2)
    syms = ring_symmetries(g)
    targets = []
    for rc in roots:
        if rc.graph.name != g.name:
            continue
        targets.append(sorted(rc.coloring.items()))
    # search without symmetry reduction so every colouring is looked at
    classes = enumerate_colorings(g, [MonoSet(*MONO_TRIPLE)], None, color_perms=False)
    missing = []
    for cl in classes:
        col = cl.as_coloring()
        hit = False
        for _, perm in syms:
            moved = {perm[i]: c for i, c in col.items()}
            for items in targets:
                cmap = {}
                if all(cmap.setdefault(moved[i], c) == c for i, c in items) and \
                        len(set(cmap.values())) == len(cmap):
                    hit = True
                    break
            if hit:
                break
        if not hit:
            missing.append(col)
    return missing


def verify_bundle(bundle_dir) -> BundleCheck:
    """Re-check a bundle from its files only."""
    root = Path(bundle_dir)
    fails: list[str] = []
    try:
        manifest = (root / "manifest.txt").read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        return BundleCheck(VERDICT_INCOMPLETE, [f"manifest: {exc}"])
    fields = [ln.split() for ln in manifest if ln and not ln.startswith("#")]
    graph_line = next((f for f in fields if f[0] == "graph"), None)
    try:
        base = parse_graph((root / graph_line[graph_line.index("file") + 1]).read_text())
    except Exception as exc:
        return BundleCheck(VERDICT_INCOMPLETE, [f"graph: {exc}"])
    if len(base) != 481 or base.edge_count() != 2814:
        fails.append(f"graph has {len(base)} vertices and {base.edge_count()} edges")

    try:
        originals = parse_root_classes((root / "roots" / "all.txt").read_text())
        classes = parse_root_classes((root / "roots" / "classes.txt").read_text())
    except Exception as exc:
        return BundleCheck(VERDICT_INCOMPLETE, [f"roots: {exc}"])
    derived = {r.label: r for r in derive_root_colorings()}
    orig = {r.label: r for r in originals}
    if {k: v.coloring for k, v in orig.items()} != {k: v.coloring for k, v in derived.items()}:
        fails.append("roots/all.txt differs from the derived 36 root colourings")
    lookup = dict(orig)
    lookup.update({c.label: c for c in classes})

    owner: dict[str, list[str]] = {}
    cert_roots = []
    n_certs = 0
    for f in (f for f in fields if f[0] == "cert"):
        label, rel = f[1], f[f.index("file") + 1]
        n_certs += 1
        try:
            d = import_diagram((root / rel).read_text(encoding="utf-8"), lookup)
        except Exception as exc:
            fails.append(f"{rel}: {exc}")
            continue
        rep = verify_diagram(base, d)
        if not rep.accepted:
            fails.append(f"{rel}: rejected {rep.failures[:3]}")
            continue
        rc = lookup.get(d.root_label)
        cert_roots.append(rc)
        covers = rc.covers if rc.covers else ()
        labels = [cv.label for cv in covers] if d.root_label in {c.label for c in classes} else [d.root_label]
        for lab in labels:
            owner.setdefault(lab, []).append(label)
        for cv in covers:
            if cv.label in orig and not cover_holds(orig[cv.label], rc, cv):
                fails.append(f"{label}: cover record for {cv.label} does not hold")
    if sorted(owner) != sorted(derived) or any(len(v) != 1 for v in owner.values()):
        fails.append("certificates do not cover the 36 root labels exactly once")
    missing = covered_by_certificates([r for r in cert_roots if r is not None])
    if missing:
        fails.append(f"{len(missing)} mono-triple colourings of the 2-Golomb graph match no certificate")

    # part 2 from the recorded witnesses
    lemmas = {}
    for f in (f for f in fields if f[0] == "lemma"):
        try:
            lemmas[f[1]] = parse_lemma((root / f[f.index("file") + 1]).read_text())
        except Exception as exc:
            fails.append(f"lemma {f[1]}: {exc}")
    need = ["wheel_types", "doubled_wheel", "two_lattices", "spindle"]
    for name in need:
        if name not in lemmas:
            fails.append(f"lemma {name} missing")
    if not fails:
        if lemma_wheel_types().witness != lemmas["wheel_types"].witness:
            fails.append("wheel_types witness differs from a fresh enumeration")
        for name, lem in lemmas.items():
            if name.startswith("lattice_lines_r"):
                fresh = lemma_lattice_lines(int(name.rsplit("r", 1)[1]))
                if not fresh.established or fresh.counts != lem.counts:
                    fails.append(f"{name} does not re-check")
        dw = lemmas["doubled_wheel"]
        fresh = lemma_doubled_wheel(int(dw.parameters.get("start_radius", 2)),
                                    int(dw.parameters.get("max_radius", 4)))
        if not fresh.established or fresh.witness != dw.witness:
            fails.append("doubled_wheel witness does not re-check")
        two = lemma_two_lattices(dw)
        if not two.established or two.witness != lemmas["two_lattices"].witness:
            fails.append("two_lattices does not follow from the doubled_wheel witness")
        if not lemma_spindle(lemmas["two_lattices"]).established:
            fails.append("spindle does not follow from the two_lattices witness")
        for name, lem in lemmas.items():
            if not lem.established:
                fails.append(f"lemma {name} recorded as {lem.status}")
    return BundleCheck(VERDICT_INCOMPLETE if fails else VERDICT_OK, fails, n_certs)


def bundle_summary(bundle_dir) -> str:
    """Table of per-certificate node counts from a bundle manifest."""
    rows = [("case", "kind", "nodes", "roots", "ends", "vertices", "checks", "raw")]
    total = 0
    for ln in (Path(bundle_dir) / "manifest.txt").read_text().splitlines():
        f = ln.split()
        if not f or f[0] != "cert":
            continue
        kv = dict(zip(f[2::2], f[3::2]))
        rows.append((f[1], kv["kind"], kv["nodes"], kv["roots"], kv["ends"], kv["vertices"],
                     kv["checks"], kv["raw"]))
        total += int(kv["checks"])
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    out = ["  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in rows]
    out.append(f"non-root nodes in total: {total}")
    return "\n".join(out)
