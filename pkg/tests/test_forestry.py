import pytest

from chi5.certificates import END, STEM, export_diagram, verify_diagram
from chi5.coloring import RootColoringClass
from chi5.forestry import (BaseGraphInsufficient, GrowthExhausted, GrowthPolicy, MinimizeBudget,
                           NodeCapHit, grow, grow_with_log, minimize, quick_refute, replay, thin,
                           thin_status)
from chi5.graphs import build_t_golomb


def test_grow_is_verified_and_deterministic(base, roots):
    for lab in ("R15", "R26"):
        a, b = grow(base, roots[lab]), grow(base, roots[lab])
        assert export_diagram(a) == export_diagram(b)
        assert verify_diagram(base, a).accepted


def test_log_replays_to_same_tree(base, roots):
    res = grow_with_log(base, roots["R27"])
    assert export_diagram(replay(base, roots["R27"], res.log)) == export_diagram(res.diagram)
    branch_passes = [r for r in res.log if r.current_node in {x.current_node for x in res.log if x is not r}]
    assert branch_passes  # branch nodes appear once per colour


def test_stems_were_forced_at_assignment(base, roots):
    d = grow(base, roots["R31"])
    for n in d.nodes:
        if n.kind == STEM:
            assert n.free_colors() == [n.out_color]


def test_forced_end_in_one_node(base):
    centre = base.id_of((0, 0, 0, 0))
    ring = sorted(base.neighbors(centre))[:4]
    rc = RootColoringClass("F", base, {v: c for v, c in zip(ring, (1, 2, 3, 4))})
    d = grow(base, rc)
    assert len(d.nodes) - 4 == 1 and d.nodes[-1].kind == END
    assert quick_refute(rc, base, 1) is not None


def test_exhausted_on_small_working_graph(roots):
    with pytest.raises(GrowthExhausted):
        grow(build_t_golomb(2), roots["R12"])


def test_node_cap(base, roots):
    with pytest.raises(NodeCapHit):
        grow(base, roots["R22"], GrowthPolicy(node_cap=10))


def test_improper_root_rejected(base):
    g2 = build_t_golomb(2)
    bad = RootColoringClass("bad", g2, {1: 1, 2: 1})
    with pytest.raises(ValueError):
        grow(base, bad)


def test_thin_monotone_and_idempotent(base, roots):
    for lab in ("R12", "R38"):
        d = grow(base, roots[lab])
        t = thin(d)
        assert len(t.nodes) <= len(d.nodes)
        assert verify_diagram(base, t).accepted
        assert export_diagram(thin(t)) == export_diagram(t)
        assert set(thin_status(t).values()) <= {"necessary"}


def test_thin_removes_uncited_node(base, roots):
    d = grow(base, roots["R15"])
    st = thin_status(d)
    uncited = [o for o, s in st.items() if s == "redundant"]
    assert uncited
    kept = {n.vertex for n in thin(d).nodes}
    by = d.by_ordinal()
    assert any(by[o].vertex not in kept for o in uncited)


def test_thin_rejects_bad_input(base, roots):
    d = grow(base, roots["R15"])
    d.nodes[-1].ports = {}
    with pytest.raises(ValueError):
        thin(d)


def test_degenerate_budget_is_grow_plus_thin(base, roots):
    rc = roots["R26"]
    d, log = minimize(rc, base, MinimizeBudget(restarts=1, mutations_per_round=0))
    assert export_diagram(d).splitlines()[1:] == export_diagram(thin(grow(base, rc))).splitlines()[1:]
    assert log.best_by_round == [len(d.nodes)]


def test_minimize_monotone_and_seeded(base, roots):
    rc = roots["R15"]
    budget = MinimizeBudget(restarts=3, mutations_per_round=3, max_rounds=3, seed=5, node_cap=2000)
    d1, log1 = minimize(rc, base, budget)
    d2, log2 = minimize(rc, base, budget, jobs=2)
    assert export_diagram(d1) == export_diagram(d2)
    assert log1.best_by_round == log2.best_by_round
    assert all(b <= a for a, b in zip(log1.best_by_round, log1.best_by_round[1:]))
    assert verify_diagram(base, d1).accepted


def test_minimize_all_exhausted(roots):
    with pytest.raises(BaseGraphInsufficient, match="base graph insufficient"):
        minimize(roots["R12"], build_t_golomb(2), MinimizeBudget(restarts=1, mutations_per_round=0))


def test_quick_refute_cap_zero(base, roots):
    assert quick_refute(roots["R11"], base, 0) is None


@pytest.mark.parametrize("label", ["R11", "R20", "R32", "R47"])
def test_quick_refutes_mono_pair_colourings(base, roots, label):
    d = quick_refute(roots[label], base, 8)
    assert d is not None
    assert len(d.nodes) - len(roots[label].coloring) <= 8
    assert verify_diagram(base, d).accepted
