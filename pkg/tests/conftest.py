from fractions import Fraction

import pytest

from newton_socle import SparsePoly, newton_polyhedron

# the regression family used across the verification suites
FAMILY = [
    "x1^2 + x2^3",
    "x1^2 + x2^2",
    "x1^2 + x1*x2 + x2^3",
    "x1^3 + x2^3",
    "x1^2 + x2^5",
    "x1^2 + x2^2 + x3^2",
]


def poly(text, nvars=None):
    return SparsePoly.parse(text, nvars=nvars)


@pytest.fixture(scope="session")
def family():
    return [SparsePoly.parse(s) for s in FAMILY]


@pytest.fixture(scope="session")
def family_polyhedra(family):
    return [(f, newton_polyhedron(f)) for f in family]


def frac(a, b=1):
    return Fraction(a, b)
