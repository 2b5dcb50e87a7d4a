import shutil
from pathlib import Path

import pytest

from chi5 import pipeline
from chi5.pipeline import (VERDICT_INCOMPLETE, VERDICT_OK, bundle_summary, case_split_counts,
                           foundation_checks, verify_bundle)

pytestmark = pytest.mark.slow


def test_case_split_counts():
    assert case_split_counts() == {"wheel_mono": 2, "golomb_mono": 4}


def test_foundation_checks_pass(base):
    assert foundation_checks(base) == []


def test_run_is_established(proof_run):
    bundle, out, _ = proof_run
    assert bundle.verdict == VERDICT_OK and bundle.failing_stage is None
    p1 = bundle.part1
    assert p1.failures == []
    assert len(p1.quick_refuted) == 24
    assert all(c.report.accepted for c in p1.certificates)
    manifest = (out / "manifest.txt").read_text()
    assert manifest.rstrip().endswith("verdict chi >= 5")
    assert "seed 7" in manifest


def test_bundle_reverifies(proof_run):
    chk = verify_bundle(proof_run[1])
    assert chk.ok, chk.failures
    assert chk.certificates == len(proof_run[0].part1.certificates)


def _copy(src, tmp_path) -> Path:
    dst = tmp_path / "bundle"
    shutil.copytree(src, dst)
    return dst


def test_tampered_certificate_is_incomplete(proof_run, tmp_path):
    dst = _copy(proof_run[1], tmp_path)
    cert = dst / "certs" / "R22.txt"
    lines = cert.read_text().splitlines()
    k = next(i for i, ln in enumerate(lines) if " END " in ln)
    ln = lines[k].split()
    port = next(p for p in ("P1", "P2", "P3", "P4") if ln[ln.index(p) + 1] != "-")
    ln[ln.index(port) + 1] = "-"  # an End that loses a justifier
    lines[k] = " ".join(ln)
    cert.write_text("\n".join(lines) + "\n")
    chk = verify_bundle(dst)
    assert chk.verdict == VERDICT_INCOMPLETE
    assert any("R22" in f for f in chk.failures)


def test_missing_certificate_breaks_coverage(proof_run, tmp_path):
    dst = _copy(proof_run[1], tmp_path)
    m = dst / "manifest.txt"
    m.write_text("".join(ln for ln in m.read_text().splitlines(True) if not ln.startswith("cert R15 ")))
    chk = verify_bundle(dst)
    assert not chk.ok
    assert any("exactly once" in f for f in chk.failures)
    assert any("match no certificate" in f for f in chk.failures)


def test_tampered_lemma_witness(proof_run, tmp_path):
    dst = _copy(proof_run[1], tmp_path)
    f = dst / "lemmas" / "doubled_wheel.txt"
    f.write_text(f.read_text().replace("ASSIGN 7 2", "ASSIGN 7 3", 1))
    assert not verify_bundle(dst).ok


def test_missing_manifest(tmp_path):
    chk = verify_bundle(tmp_path)
    assert chk.verdict == VERDICT_INCOMPLETE


def test_summary(proof_run):
    text = bundle_summary(proof_run[1])
    total = sum(c.report.stats.elementary_checks for c in proof_run[0].part1.certificates)
    assert text.splitlines()[-1] == f"non-root nodes in total: {total}"


def test_verdict_gated_on_foundations(proof_run, monkeypatch):
    part1 = proof_run[0].part1
    monkeypatch.setattr(pipeline, "prove_non_mono_triple",
                        lambda base, cfg, progress: pipeline.Part1Result(**{**vars(part1), "failures": []}))
    assert pipeline.full_proof().verdict == VERDICT_OK
    monkeypatch.setattr(pipeline, "enumerate_unit_vectors", lambda: frozenset())
    bundle = pipeline.full_proof()
    assert bundle.verdict == VERDICT_INCOMPLETE and bundle.failing_stage == "part1"
