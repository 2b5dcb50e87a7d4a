"""One test per acceptance criterion; each prints a PASS or FAIL line."""

import filecmp
import itertools
import random
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from chi5.certificates import MUTATIONS, export_diagram, mutate, verify_diagram
from chi5.coloring import (NonMonoSet, constraint_group, derive_root_colorings, enumerate_colorings,
                           has_mono_antipodal_pair)
from chi5.forestry import grow, quick_refute, thin
from chi5.graphs import (REFERENCE_ORBITS, RADIUS_TOL, build_base_graph, build_t_golomb,
                         orbit_stats, spindle_identities)
from chi5.pipeline import (MAX_TOTAL_NODES, MIN_THIN_REDUCTION, VERDICT_OK, case_split_counts,
                           mean_thin_reduction, verify_bundle)
from chi5.ring import enumerate_unit_vectors


@contextmanager
def criterion(n, title, capsys):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {title}")


def templates():
    out = set()
    for x in ((12, 0, 0, 0), (10, 0, 0, 2), (6, 0, 6, 0), (0, 2, 2, 0)):
        for signs in itertools.product((1, -1), repeat=4):
            out.add(tuple(s * v for s, v in zip(signs, x)))
    for x in ((5, 1, 5, 1), (3, 1, 1, 3)):
        for signs in itertools.product((1, -1), repeat=4):
            if signs.count(-1) % 2:
                out.add(tuple(s * v for s, v in zip(signs, x)))
    return out


def test_1_unit_vectors(capsys):
    with criterion(1, "unit vectors", capsys):
        t = time.perf_counter()
        got = {tuple(v) for v in enumerate_unit_vectors()}
        assert time.perf_counter() - t < 1
        assert len(templates()) == 30 and got == templates()


def test_2_base_graph(capsys):
    with criterion(2, "base graph and orbit table", capsys):
        t = time.perf_counter()
        g = build_base_graph()
        stats = orbit_stats(g)
        assert time.perf_counter() - t < 10
        assert len(g) == 481
        assert sorted(s.order for s in stats) == sorted([1] + [6] * 4 + [12] * 10 + [24] * 14)
        ref = {rep: (radii, deg, order) for rep, radii, deg, order in REFERENCE_ORBITS}
        assert len(stats) == len(ref) == 29
        for s in stats:
            radii, deg, order = ref[tuple(s.representative)]
            assert (s.degree, s.order) == (deg, order)
            assert len(s.radii) == len(radii)
            assert all(abs(a - b) <= RADIUS_TOL for a, b in zip(s.radii, radii))
        assert g.edge_count() == 2814 == sum(s.order * s.degree for s in stats) // 2


def test_3_enumeration_counts(capsys):
    with criterion(3, "enumeration counts", capsys):
        t = time.perf_counter()
        assert case_split_counts() == {"wheel_mono": 2, "golomb_mono": 4}
        w = build_t_golomb(0)
        nm = [NonMonoSet(2, 3, 4), NonMonoSet(5, 6, 7)]
        assert len(enumerate_colorings(w, nm, constraint_group(w, nm))) == 2
        roots = derive_root_colorings()
        assert len(roots) == 36
        assert [sum(r.label[1] == str(a) for r in roots) for a in range(1, 5)] == [6, 10, 10, 10]
        assert sum(has_mono_antipodal_pair(r) for r in roots) == 19
        assert time.perf_counter() - t < 60


@pytest.mark.slow
def test_4_quick_refutation(proof_run, base, capsys):
    with criterion(4, "quick refutations", capsys):
        p1 = proof_run[0].part1
        assert len(p1.quick_refuted) >= 24
        by = {r.label: r for r in p1.roots}
        for c in p1.certificates:
            if c.kind == "quick":
                assert len(c.diagram.nodes) - len(by[c.label].coloring) <= 8
                assert verify_diagram(base, c.diagram).accepted
        # spot check outside the run, on fresh objects
        assert quick_refute(by["R40"], base, 8) is not None


@pytest.mark.slow
def test_5_part1(proof_run, base, capsys):
    with criterion(5, "part 1 end to end", capsys):
        bundle, _, seconds = proof_run
        p1 = bundle.part1
        assert p1.established
        owners = {}
        for c in p1.certificates:
            assert verify_diagram(base, c.diagram).accepted
            for lab in c.covers:
                owners.setdefault(lab, []).append(c.label)
            if c.kind == "class":
                assert c.raw_nodes is not None  # grower-produced
        assert sorted(owners) == sorted(r.label for r in derive_root_colorings())
        assert all(len(v) == 1 for v in owners.values())
        total = sum(c.report.stats.elementary_checks for c in p1.certificates)
        assert total <= MAX_TOTAL_NODES
        assert mean_thin_reduction(p1.certificates) >= MIN_THIN_REDUCTION
        assert seconds <= 3600


@pytest.mark.slow
def test_6_part2(proof_run, capsys):
    with criterion(6, "part 2 lemmas", capsys):
        lem = {x.lemma: x for x in proof_run[0].part2}
        assert all(x.established for x in lem.values())
        assert lem["wheel_types"].counts["classes"] == 2
        dw = lem["doubled_wheel"]
        assert dw.counts["classes"] == 3 and len(dw.witness) == 3
        assert all(len(set(col)) <= 2 for col in dw.witness)
        two = lem["two_lattices"]
        assert two.counts["classes"] == 2 and two.counts["non_mono_distance4"] == 0
        assert all(ok for _, _, ok in spindle_identities())
        assert lem["spindle"].parameters == {"hexagon_chord_sq": "1", "spindle_chord_sq": "1"}


def test_7_adversarial(base, roots, capsys):
    with criterion(7, "verifier rejects mutants", capsys):
        d = thin(grow(base, roots["R22"]))
        assert verify_diagram(base, d).accepted
        t = time.perf_counter()
        for category, reason in MUTATIONS.items():
            rng = random.Random(category)
            for _ in range(20):
                m = mutate(d, category, rng)
                assert m is not None, category
                rep = verify_diagram(base, m)
                assert not rep.accepted and reason in rep.reasons(), (category, rep.failures)
        assert time.perf_counter() - t < 60


@pytest.mark.slow
def test_8_determinism(proof_run, proof_run_again, base, capsys):
    with criterion(8, "determinism", capsys):
        a, b = proof_run[1], proof_run_again[1]
        files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
        assert files_a == files_b
        _, mismatch, errors = filecmp.cmpfiles(a, b, [str(p) for p in files_a], shallow=False)
        assert mismatch == [] and errors == []
        for c in proof_run[0].part1.certificates:
            assert export_diagram(thin(c.diagram)) == export_diagram(c.diagram)


@pytest.mark.slow
def test_9_verdict(proof_run, capsys):
    with criterion(9, "verdict and standalone re-check", capsys):
        bundle, out, _ = proof_run
        assert bundle.verdict == VERDICT_OK
        chk = verify_bundle(out)
        assert chk.ok, chk.failures
        run = subprocess.run([sys.executable, "-m", "chi5", "verify", str(out)],
                             capture_output=True, text=True)
        assert run.returncode == 0, run.stdout + run.stderr
        assert "verdict chi >= 5" in run.stdout
