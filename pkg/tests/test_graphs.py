from collections import Counter
from fractions import Fraction

import pytest

from chi5.graphs import (REFERENCE_ORBITS, BASE_ORBIT_REPS, GraphConstructionError, build_lattice_patch,
                         build_t_golomb, build_two_lattice_config, check_orbit_table, expand_orbit,
                         format_graph, orbit_stats, parse_graph, spindle_identities, sqrt3_triples)
from chi5.ring import GROUP, RingVector, is_unit


def test_base_graph_size(base):
    assert len(base) == 481
    # edge count from the reference table alone: sum of order * degree over orbits, halved
    assert sum(order * deg for _, _, deg, order in REFERENCE_ORBITS) // 2 == 2814
    assert base.edge_count() == 2814


def test_orbit_partition(base):
    orders = Counter(s.order for s in orbit_stats(base))
    assert orders == {1: 1, 6: 4, 12: 10, 24: 14}
    assert len(BASE_ORBIT_REPS) == len(REFERENCE_ORBITS) == 29


def test_orbit_table_matches_reference(base):
    assert check_orbit_table(base) == []


def test_adjacency_agrees_with_norm_check(base):
    assert base.adjacency_by_norm() == {i: base.neighbors(i) for i in base.ids}


def test_base_graph_closed_under_group(base):
    verts = set(base.vertices)
    for s in GROUP:
        assert {s(v) for v in verts} == verts


def test_orbit_expansion_orders():
    assert expand_orbit((0, 0, 0, 0)).order == 1
    assert expand_orbit((12, 0, 0, 0)).order == 6
    assert expand_orbit((2, 0, 4, 2)).order == 24


@pytest.mark.parametrize("t,n,e", [(0, 7, 12), (1, 10, 18), (2, 13, 24), (4, 19, 36)])
def test_t_golomb_sizes(t, n, e):
    g = build_t_golomb(t)
    assert len(g) == n and g.edge_count() == e


def test_t_golomb_rejects_bad_t():
    with pytest.raises(ValueError):
        build_t_golomb(3)


def test_wheel_triples():
    assert sqrt3_triples(build_t_golomb(0)) == [(2, 3, 4), (5, 6, 7)]


def test_golomb_inner_triangle():
    g = build_t_golomb(1)
    assert g.adjacent(8, 9) and g.adjacent(9, 10) and g.adjacent(8, 10)
    # each inner vertex sits at unit distance from one vertex of the triple
    assert sorted(len(g.neighbors(i) & {2, 3, 4}) for i in (8, 9, 10)) == [1, 1, 1]


def test_graph_text_round_trip(base):
    g = build_t_golomb(2)
    back = parse_graph(format_graph(g))
    assert back.vertices == g.vertices and back.edges() == g.edges()
    text = format_graph(g).replace("EDGES", "EDGES\n1 13")
    with pytest.raises(ValueError):
        parse_graph(text)


def test_subgraph_keeps_coordinates(base):
    sub = base.subgraph(range(1, 50), name="first49")
    assert len(sub) == 49
    for i, j in sub.edges():
        assert is_unit(sub.vertex(i) - sub.vertex(j))


def test_lattice_patch():
    p = build_lattice_patch(2)
    assert len(p) == 19
    assert len(p.interior()) == 7
    assert len(p.symmetry_permutations()) == 12
    assert all(len(p.neighbors(i)) == 6 for i in p.interior())


def test_two_lattice_config_exact():
    cfg = build_two_lattice_config()
    assert cfg.edges == [(cfg.a_id(k), cfg.b_id(k)) for k in range(6)]
    assert cfg.distance4_pairs == [(2, 5), (3, 6), (4, 7), (8, 11), (9, 12), (10, 13)]
    assert cfg.squared_distance(1, 2).equals_rational(4)
    # float cross-check of one non-rational distance
    d = cfg.squared_distance(2, 9)
    assert not d.equals_rational(Fraction(785, 100))
    assert abs(float(d.x) + float(d.y) * float(d.radicand) ** 0.5 - 7.854) < 1e-3


def test_spindle_identities():
    checks = spindle_identities()
    assert [v for _, v, _ in checks] == [1, 1]
    assert all(ok for _, _, ok in checks)
