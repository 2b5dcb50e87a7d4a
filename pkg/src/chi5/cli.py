"""Command-line entry point: ``chi5 <command> ...`` or ``python -m chi5``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import certificates as cert
from .coloring import (FIXED_MERGE_PLAN, derive_root_colorings, format_root_class,
                       merge_root_classes, parse_root_classes)
from .forestry import (BaseGraphInsufficient, GrowthExhausted, GrowthPolicy, NodeCapHit, grow,
                       minimize, quick_refute, thin)
from .graphs import build_base_graph, check_orbit_table, format_graph, orbit_stats, parse_graph
from .pipeline import DEEP, FAST, VERDICT_OK, bundle_summary, full_proof, verify_bundle

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("chi5")


def _config(args):
    cfg = DEEP if getattr(args, "deep", False) else FAST
    over = {}
    for key, attr in (("seed", "seed"), ("restarts", "restarts"), ("mutations", "mutations"),
                      ("rounds", "max_rounds"), ("cap", "node_cap"), ("radius", "radius"),
                      ("jobs", "jobs")):
        v = getattr(args, key, None)
        if v is not None:
            over[attr] = v
    if getattr(args, "fixed_merge", False):
        over["merge_plan"] = "fixed"
    if over.get("mutations") and "max_rounds" not in over and cfg.max_rounds == 0:
        over["max_rounds"] = 3
    return replace(cfg, **over)


def _out(args, default: str) -> Path:
    p = Path(args.out or default)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_build_base(args) -> int:
    g = build_base_graph()
    out = _out(args, ".")
    (out / f"{g.name}.txt").write_text(format_graph(g))
    rows = ["representative  radii  degree  order"]
    for s in orbit_stats(g):
        rows.append(f"{s.representative}  {', '.join(f'{r:.4f}' for r in s.radii)}  {s.degree}  {s.order}")
    (out / "orbits.txt").write_text("\n".join(rows) + "\n")
    print(f"{len(g)} vertices, {g.edge_count()} edges")
    problems = check_orbit_table(g)
    for p in problems:
        print(f"orbit table mismatch: {p}")
    return EXIT_FAIL if problems else EXIT_OK


def _root_classes(args, base):
    roots = derive_root_colorings()
    refuted = {}
    for r in roots:
        d = quick_refute(r, base, args.quick_cap)
        if d is not None:
            refuted[r.label] = thin(d)
    merge = merge_root_classes(roots, refuted, FIXED_MERGE_PLAN if args.fixed_merge else None)
    return roots, refuted, merge


def cmd_roots(args) -> int:
    base = build_base_graph()
    out = _out(args, "roots")
    roots, refuted, merge = _root_classes(args, base)
    (out / "all.txt").write_text("".join(format_root_class(r) for r in roots))
    (out / "classes.txt").write_text("".join(format_root_class(c) for c in merge.classes))
    lines = [f"{r.label} {r.color_string()} {'refuted in ' + str(len(refuted[r.label].nodes) - len(r.coloring)) if r.label in refuted else 'open'}"
             for r in roots]
    lines += [f"merge {n}" for n in merge.notes]
    lines += [f"class {c.label} roots {len(c.coloring)} covers {' '.join(c.covered_labels())}"
              for c in merge.classes]
    (out / "quick.txt").write_text("\n".join(lines) + "\n")
    for lab, d in sorted(refuted.items()):
        (out / f"quick-{lab}.txt").write_text(cert.export_diagram(d))
    print(f"{len(roots)} root colourings, {len(refuted)} quickly refuted, {len(merge.classes)} classes")
    return EXIT_OK


def _find_class(label, args):
    path = Path(args.roots) if args.roots else None
    if path is not None:
        for rc in parse_root_classes(path.read_text()):
            if rc.label == label:
                return rc
    for rc in derive_root_colorings():
        if rc.label == label:
            return rc
    raise KeyError(label)


def cmd_tree(args) -> int:
    base = build_base_graph()
    try:
        rc = _find_class(args.cls, args)
    except KeyError:
        print(f"unknown class {args.cls!r}; pass --roots <classes file> for merged classes", file=sys.stderr)
        return EXIT_USAGE
    cfg = _config(args)
    try:
        if args.command == "grow":
            d = grow(base, rc, GrowthPolicy(node_cap=cfg.node_cap), name=f"grow-{rc.label}")
        elif args.command == "thin":
            d = thin(grow(base, rc), check=True)
            d.name = f"thin-{rc.label}"
        else:
            d, mlog = minimize(rc, base, cfg.budget(), jobs=cfg.jobs, name=f"min-{rc.label}")
            print(mlog.summary())
    except (GrowthExhausted, NodeCapHit, BaseGraphInsufficient) as exc:
        print(f"{rc.label}: {exc}")
        return EXIT_FAIL
    rep = cert.verify_diagram(base, d)
    out = _out(args, "certs")
    (out / f"{d.name}.txt").write_text(cert.export_diagram(d))
    print(f"{d.name}: {cert.diagram_stats(d)} {rep.verdict}")
    return EXIT_OK if rep.accepted else EXIT_INTERNAL


def cmd_verify(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        chk = verify_bundle(path)
        for f in chk.failures:
            print(f"failure: {f}")
        print(f"{chk.certificates} certificates, verdict {chk.verdict}")
        return EXIT_OK if chk.ok else EXIT_FAIL
    base = parse_graph(Path(args.graph).read_text()) if args.graph else build_base_graph()
    lookup = {}
    for rc in derive_root_colorings():
        lookup[rc.label] = rc
    if args.roots:
        for rc in parse_root_classes(Path(args.roots).read_text()):
            lookup[rc.label] = rc
    text = path.read_text()
    try:
        d = cert.import_flat(text, lookup) if text.lstrip().startswith("FLAT") else cert.import_diagram(text, lookup)
    except cert.DiagramParseError as exc:
        print(f"parse error: {exc}")
        return EXIT_FAIL
    rep = cert.verify_diagram(base, d)
    for o, reason in rep.failures:
        print(f"node {o}: {reason}")
    print(f"{d.name}: {rep.stats} {rep.verdict}")
    return EXIT_OK if rep.accepted else EXIT_FAIL


def cmd_prove(args) -> int:
    cfg = _config(args)
    out = _out(args, "bundle")
    t = time.perf_counter()
    bundle = full_proof(cfg, out, progress=log.info)
    print(f"verdict: {bundle.verdict}" + (f" (failed at {bundle.failing_stage})" if bundle.failing_stage else ""))
    print(f"wall time {time.perf_counter() - t:.1f}s, bundle in {out}")
    return EXIT_OK if bundle.verdict == VERDICT_OK else EXIT_FAIL


def cmd_stats(args) -> int:
    print(bundle_summary(args.bundle))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chi5", description="Certificates for a five-colour lower bound of the plane.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def budget_flags(p):
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--mutations", type=int)
        p.add_argument("--rounds", type=int)
        p.add_argument("--cap", type=int, help="node cap for grown trees")

    p = sub.add_parser("build-base", help="write the base graph and its orbit table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_base)

    p = sub.add_parser("roots", help="root colourings, quick refutations and merged classes")
    p.add_argument("--out")
    p.add_argument("--quick-cap", type=int, default=8)
    p.add_argument("--fixed-merge", action="store_true", help="merge R40-R49 on vertices 1..10 and R23-R26 on 1..11")
    p.set_defaults(func=cmd_roots)

    for name in ("grow", "thin", "minimize"):
        p = sub.add_parser(name, help=f"{name} a certificate for one root class")
        p.add_argument("--class", dest="cls", required=True)
        p.add_argument("--roots", help="root-class file holding merged classes")
        p.add_argument("--out")
        budget_flags(p)
        p.set_defaults(func=cmd_tree)

    p = sub.add_parser("verify", help="verify a certificate file or a bundle directory")
    p.add_argument("path")
    p.add_argument("--graph")
    p.add_argument("--roots")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("prove", help="run both parts and write a bundle")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--fast", action="store_true")
    mode.add_argument("--deep", action="store_true")
    p.add_argument("--out")
    p.add_argument("--radius", type=int)
    p.add_argument("--fixed-merge", action="store_true")
    budget_flags(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("stats", help="node-count summary of a bundle")
    p.add_argument("bundle")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
