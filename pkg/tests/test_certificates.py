import random
from dataclasses import replace

import pytest

from chi5.certificates import (BRANCH, END, MUTATIONS, ROOT, STEM, DiagramParseError, depth_first,
                               diagram_stats, export_diagram, export_flat, import_diagram, import_flat,
                               mutate, verify_diagram)
from chi5.forestry import grow, quick_refute, thin
from chi5.ring import RingVector


@pytest.fixture(scope="module")
def branched(base, roots):
    return thin(grow(base, roots["R22"]))


@pytest.fixture(scope="module")
def small(base, roots):
    return thin(quick_refute(roots["R11"], base))


def test_accepts_grown_and_thinned(base, branched, small):
    for d in (branched, small):
        rep = verify_diagram(base, d)
        assert rep.accepted, rep.failures
    assert any(n.kind == BRANCH for n in branched.nodes)


def test_stats(small, branched):
    for d in (small, branched):
        s = diagram_stats(d)
        assert s.elementary_checks == s.nodes_total - s.root_nodes
        assert s.end_nodes == sum(n.kind == END for n in d.nodes)
    assert diagram_stats(small).root_nodes == 13


def test_every_path_is_proper_until_its_end(base, branched):
    nodes = branched.by_ordinal()
    for leaf in (n for n in branched.nodes if n.kind == END):
        path, n = [], leaf
        while n.parent is not None and nodes[n.parent].kind != ROOT:
            p = nodes[n.parent]
            path.append((p.vertex, p.out_color if p.kind == STEM else n.via))
            n = p
        path += [(r.vertex, r.out_color) for r in branched.roots()]
        pc = {base.id_of(v): c for v, c in path}
        assert all(pc[u] != pc[w] for u in pc for w in base.neighbors(u) if w in pc)
        blocked = {pc[w] for w in base.neighbors(base.id_of(leaf.vertex)) if w in pc}
        assert blocked == {1, 2, 3, 4}


@pytest.mark.parametrize("category", sorted(MUTATIONS))
def test_mutations_rejected_with_reason(base, branched, category):
    rng = random.Random(category)
    for _ in range(20):
        m = mutate(branched, category, rng)
        rep = verify_diagram(base, m)
        assert not rep.accepted
        assert MUTATIONS[category] in rep.reasons(), rep.failures


def test_rerouted_to_non_neighbor_is_distance(base, small):
    m = mutate(small, "reroute port", random.Random(0))
    assert "distance" in verify_diagram(base, m).reasons()


def test_missing_branch_subtree(base, branched):
    m = mutate(branched, "drop branch child", random.Random(3))
    assert "branch coverage" in verify_diagram(base, m).reasons()


def test_structural_errors_do_not_crash(base, small):
    d = replace(small, nodes=list(small.nodes))
    d.nodes.append(replace(d.nodes[-1]))  # duplicate ordinal
    assert "structure" in verify_diagram(base, d).reasons()
    d = replace(small, nodes=[replace(n) for n in small.nodes])
    d.nodes[-1].parent = 999  # dangling parent
    assert "structure" in verify_diagram(base, d).reasons()
    d = replace(small, nodes=[replace(n) for n in small.nodes])
    d.nodes[-1].vertex = RingVector(1000, 0, 0, 0)
    assert "unknown vertex" in verify_diagram(base, d).reasons()
    d = replace(small, root_class=None)
    assert "root class" in verify_diagram(base, d).reasons()


def test_repeat_vertex(base, small):
    d = replace(small, nodes=[replace(n) for n in small.nodes])
    last = d.nodes[-1]
    last.vertex = d.nodes[0].vertex
    assert "repeat vertex" in verify_diagram(base, d).reasons()


def test_wrong_root_class(base, small, roots):
    d = replace(small, root_class=roots["R14"], root_label="R14")
    assert "root class" in verify_diagram(base, d).reasons()


def test_export_import_identity(branched, roots):
    text = export_diagram(branched)
    back = import_diagram(text, {"R22": roots["R22"]})
    assert export_diagram(back) == text


def test_stem_line_format(branched):
    line = next(ln for ln in export_diagram(branched).splitlines() if " OUT " in ln and "BRANCH" not in ln
                and "END" not in ln)
    parts = line.split()
    assert parts[0] == "N" and parts[2] == "V" and parts[4:12:2] == ["P1", "P2", "P3", "P4"]
    assert parts[12] == "OUT" and parts[14] == "PARENT"


def test_import_accepts_omitted_ports(roots, base):
    text = export_diagram(thin(quick_refute(roots["R11"], base)))
    short = "\n".join(ln.replace(" P3 -", "") if ln.startswith("N") else ln for ln in text.splitlines())
    d = import_diagram(short, {"R11": roots["R11"]})
    assert verify_diagram(base, d).accepted


def test_ordinal_gap_is_parse_error(small):
    lines = export_diagram(small).splitlines()
    del lines[5]
    with pytest.raises(DiagramParseError, match="line"):
        import_diagram("\n".join(lines))


def test_flat_round_trip(base, branched, roots):
    flat = export_flat(depth_first(branched))
    back = import_flat(flat, {"R22": roots["R22"]})
    assert verify_diagram(base, back).accepted
    assert export_diagram(back) == export_diagram(depth_first(branched))


def test_node_order_does_not_matter(base, branched):
    d = replace(branched, nodes=list(reversed(branched.nodes)))
    assert verify_diagram(base, d).accepted
