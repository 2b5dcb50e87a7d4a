"""Exact arithmetic on base-graph coordinates.

A vertex is an integer 4-vector ``(a, b, c, d)`` standing for the complex
number ``(a + b*sqrt(33) + i*(c*sqrt(3) + d*sqrt(11))) / 12``.  Squared
moduli live in ``Z[sqrt(33)] / 144`` and are kept as integer pairs, so no
floating point ever enters an adjacency decision.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cache
from typing import NamedTuple


class DegenerateInputError(ValueError):
    """Raised when a vector cannot be rotated inside the lattice."""


class RingVector(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    def __add__(self, other):
        return RingVector(self.a + other.a, self.b + other.b,
                          self.c + other.c, self.d + other.d)

    def __sub__(self, other):
        return RingVector(self.a - other.a, self.b - other.b,
                          self.c - other.c, self.d - other.d)

    def __neg__(self):
        return RingVector(-self.a, -self.b, -self.c, -self.d)

    def __str__(self):
        return f"({self.a},{self.b},{self.c},{self.d})"

    def to_complex(self) -> complex:
        """Floating-point position; for display only."""
        re_ = (self.a + self.b * math.sqrt(33)) / 12
        im = (self.c * math.sqrt(3) + self.d * math.sqrt(11)) / 12
        return complex(re_, im)


ZERO = RingVector(0, 0, 0, 0)

_VEC_RE = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")


def parse_vector(text: str) -> RingVector:
    m = _VEC_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a ring vector: {text!r}")
    return RingVector(*(int(x) for x in m.groups()))


class Norm33(NamedTuple):
    """Squared length ``(p + q*sqrt(33)) / 144``."""

    p: int
    q: int

    def value(self) -> float:
        return (self.p + self.q * math.sqrt(33)) / 144

    def radius(self) -> float:
        return math.sqrt(max(self.value(), 0.0))

    def __str__(self):
        return f"({self.p}{self.q:+d}*sqrt33)/144"


UNIT_NORM = Norm33(144, 0)
SQRT3_NORM = Norm33(432, 0)


def norm_sq(v) -> Norm33:
    a, b, c, d = v
    return Norm33(a * a + 33 * b * b + 3 * c * c + 11 * d * d, 2 * (a * b + c * d))


def is_unit(v) -> bool:
    return norm_sq(v) == UNIT_NORM


def has_rotation_parity(v) -> bool:
    return (v[0] + v[2]) % 2 == 0 and (v[1] + v[3]) % 2 == 0


def rotate60(v) -> RingVector:
    """Multiply the point by ``(1 + i*sqrt(3)) / 2``."""
    a, b, c, d = v
    if not has_rotation_parity(v):
        raise DegenerateInputError(f"cannot rotate {RingVector(*v)}: a+c and b+d must be even")
    return RingVector((a - 3 * c) // 2, (b - d) // 2, (a + c) // 2, (3 * b + d) // 2)


def conjugate(v) -> RingVector:
    # the Galois map sqrt(33) -> -sqrt(33), sqrt(3) -> -sqrt(3), sqrt(11) fixed
    a, b, c, d = v
    return RingVector(a, -b, -c, d)


def mirror_real(v) -> RingVector:
    a, b, c, d = v
    return RingVector(a, b, -c, -d)


@cache
def enumerate_unit_vectors() -> frozenset[RingVector]:
    """All lattice differences of unit length.

    Any solution of a^2 + 33b^2 + 3c^2 + 11d^2 = 144 fits the box below, so
    the scan is exhaustive.
    """
    out = set()
    for a, b, c, d in itertools.product(range(-12, 13), range(-2, 3),
                                        range(-6, 7), range(-3, 4)):
        if a * a + 33 * b * b + 3 * c * c + 11 * d * d == 144 and a * b + c * d == 0:
            out.add(RingVector(a, b, c, d))
    return frozenset(out)


@dataclass(frozen=True, order=True)
class SymmetryElement:
    """``conj? . mirror? . rotate60^rot`` -- rotation applied first."""

    rot: int = 0
    mirror: bool = False
    conj: bool = False

    def __post_init__(self):
        if not 0 <= self.rot < 6:
            raise ValueError(f"rot must be in 0..5, got {self.rot}")

    def __call__(self, v) -> RingVector:
        return apply(self, v)

    def __str__(self):
        return f"{self.rot} {int(self.mirror)} {int(self.conj)}"

    @classmethod
    def parse(cls, text: str) -> "SymmetryElement":
        r, m, c = text.split()
        return cls(int(r), bool(int(m)), bool(int(c)))

    def is_identity(self) -> bool:
        return self == IDENTITY


IDENTITY = SymmetryElement()


def apply(s: SymmetryElement, v) -> RingVector:
    v = RingVector(*v)
    for _ in range(s.rot):
        v = rotate60(v)
    if s.mirror:
        v = mirror_real(v)
    if s.conj:
        v = conjugate(v)
    return v


GROUP: tuple[SymmetryElement, ...] = tuple(
    SymmetryElement(r, m, c) for r in range(6) for m in (False, True) for c in (False, True))

# Stabiliser of this vector is trivial, so its image pins down a group element.
_PROBE = RingVector(2, 0, 4, 2)


@cache
def _by_probe_image() -> dict[RingVector, SymmetryElement]:
    table = {s(_PROBE): s for s in GROUP}
    if len(table) != len(GROUP):
        raise AssertionError("probe vector has a non-trivial stabiliser")
    return table


def compose(s: SymmetryElement, t: SymmetryElement) -> SymmetryElement:
    """The element acting as ``s(t(v))``."""
    try:
        return _by_probe_image()[s(t(_PROBE))]
    except KeyError:
        raise AssertionError(f"group not closed under {s} o {t}") from None


def inverse(s: SymmetryElement) -> SymmetryElement:
    for t in GROUP:
        if compose(t, s) == IDENTITY:
            return t
    raise AssertionError(f"{s} has no inverse")


def element_order(s: SymmetryElement) -> int:
    k, p = 1, s
    while p != IDENTITY:
        p = compose(s, p)
        k += 1
    return k
