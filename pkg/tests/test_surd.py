from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from handleforge.surd import SQRT2, Surd, exact_sqrt

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)
surds = st.builds(Surd, fractions, fractions)


def test_basic_identities():
    assert SQRT2 * SQRT2 == 2
    assert (SQRT2 + 1) * (SQRT2 - 1) == 1
    assert 1 / (SQRT2 - 1) == SQRT2 + 1
    assert str(SQRT2 + 1) == "1+sqrt2"
    assert str(Surd(1, -2)) == "1-2*sqrt2"
    assert float(SQRT2) == pytest.approx(2**0.5)


def test_floats_rejected():
    with pytest.raises(TypeError):
        Surd(0.5)
    with pytest.raises(ZeroDivisionError):
        Surd(1) / Surd(0)


def test_exact_sqrt():
    assert exact_sqrt(4) == 2
    assert exact_sqrt(8) == 2 * SQRT2
    assert exact_sqrt(Fraction(1, 2)) == SQRT2 / 2
    assert exact_sqrt(3) is None
    assert exact_sqrt(-1) is None


@given(surds, surds)
def test_field_laws(x, y):
    assert x + y - y == x
    assert x * y == y * x
    if x != 0:
        assert (y / x) * x == y
    assert x * x.conjugate() == x.norm()


@given(surds, surds)
def test_sign_matches_floats(x, y):
    fx, fy = float(x), float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)
    # small denominators keep nonzero surds far from 0 in floating point
    assert x.sign() == (fx > 0) - (fx < 0)


@given(surds)
def test_json_round_trip(x):
    assert Surd.from_json(x.as_json()) == x
    assert hash(Surd.from_json(x.as_json())) == hash(x)
