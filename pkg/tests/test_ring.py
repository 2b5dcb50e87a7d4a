import cmath
import itertools

import pytest
from hypothesis import given, strategies as st

from chi5.ring import (GROUP, IDENTITY, DegenerateInputError, Norm33, RingVector, SymmetryElement,
                       compose, conjugate, element_order, enumerate_unit_vectors, has_rotation_parity,
                       inverse, is_unit, mirror_real, norm_sq, parse_vector, rotate60)

ROT = cmath.exp(1j * cmath.pi / 3)


def template_vectors():
    out = set()
    for a, d in itertools.product((12, -12), (0,)):
        out.add((a, 0, 0, 0))
    for a, d in itertools.product((10, -10), (2, -2)):
        out.add((a, 0, 0, d))
    for a, c in itertools.product((6, -6), (6, -6)):
        out.add((a, 0, c, 0))
    for b, c in itertools.product((2, -2), (2, -2)):
        out.add((0, b, c, 0))
    for base in ((5, 1, 5, 1), (3, 1, 1, 3)):
        for signs in itertools.product((1, -1), repeat=4):
            if signs.count(-1) % 2 == 1:
                out.add(tuple(s * x for s, x in zip(signs, base)))
    return out


def test_unit_vectors_match_templates():
    got = {tuple(v) for v in enumerate_unit_vectors()}
    assert len(template_vectors()) == 30
    assert got == template_vectors()


def test_unit_vectors_have_float_length_one():
    for v in enumerate_unit_vectors():
        assert abs(abs(v.to_complex()) - 1) < 1e-12


def test_norm_examples():
    assert norm_sq((12, 0, 0, 0)) == Norm33(144, 0)
    assert norm_sq((0, 0, 0, 0)) == Norm33(0, 0)
    assert is_unit((5, 1, -5, 1))
    assert not is_unit((5, 1, 5, 1))


def test_rotate_requires_parity():
    assert not has_rotation_parity((1, 0, 0, 0))
    with pytest.raises(DegenerateInputError):
        rotate60((1, 0, 0, 0))


def test_rotate_six_times_is_identity():
    v = RingVector(2, 0, 4, 2)
    w = v
    for _ in range(6):
        w = rotate60(w)
    assert w == v


even_vectors = st.tuples(*(st.integers(-30, 30) for _ in range(4))).map(
    lambda t: RingVector(t[0], t[1], t[0] % 2 + 2 * t[2], t[1] % 2 + 2 * t[3]))


@given(even_vectors)
def test_rotate_matches_complex_multiplication(v):
    assert has_rotation_parity(v)
    assert abs(rotate60(v).to_complex() - v.to_complex() * ROT) < 1e-9


@given(even_vectors)
def test_norm_matches_float_modulus(v):
    assert abs(norm_sq(v).value() - abs(v.to_complex()) ** 2) < 1e-6


@given(even_vectors)
def test_symmetries_preserve_unit_set(v):
    units = enumerate_unit_vectors()
    for u in units:
        assert conjugate(u) in units and mirror_real(u) in units and rotate60(u) in units
    # mirror is complex conjugation of the point
    assert abs(mirror_real(v).to_complex() - v.to_complex().conjugate()) < 1e-9


def test_group_closed_with_inverses():
    assert len(set(GROUP)) == 24
    for s, t in itertools.product(GROUP, repeat=2):
        st_ = compose(s, t)
        for v in enumerate_unit_vectors():
            assert st_(v) == s(t(v))
    for s in GROUP:
        assert compose(inverse(s), s) == IDENTITY
    assert {element_order(s) for s in GROUP} == {1, 2, 3, 6}


def test_parse_round_trip():
    v = RingVector(-6, 0, 6, 0)
    assert str(v) == "(-6,0,6,0)"
    assert parse_vector(str(v)) == v
    assert parse_vector(" ( 1, -2,3 ,4 ) ") == RingVector(1, -2, 3, 4)
    with pytest.raises(ValueError):
        parse_vector("(1,2,3)")
    s = SymmetryElement(4, True, False)
    assert SymmetryElement.parse(str(s)) == s
