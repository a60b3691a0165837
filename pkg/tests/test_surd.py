import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubkit.surd import Surd, as_surd, squarefree_split

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
radicands = st.sampled_from([1, 2, 3, 5, 6, 10, 15])


@st.composite
def surds(draw):
    out = Surd(draw(fractions))
    for _ in range(draw(st.integers(0, 3))):
        out = out + draw(fractions) * Surd.sqrt(draw(radicands))
    return out


def test_squarefree_split():
    assert squarefree_split(72) == (6, 2)
    assert squarefree_split(1) == (1, 1)
    assert squarefree_split(50) == (5, 2)


def test_sqrt_of_square_is_rational():
    assert Surd.sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert Surd.sqrt(8) == 2 * Surd.sqrt(2)


def test_golden_ratio_inverse():
    phi = (1 + Surd.sqrt(5)) / 2
    assert phi.inverse() == (Surd.sqrt(5) - 1) / 2
    assert phi * phi == phi + 1


def test_biquadratic_inverse():
    x = Surd.sqrt(2) + Surd.sqrt(3)
    assert x * x.inverse() == 1
    assert (x * x).radicals() == (1, 6)


@given(surds(), surds(), surds())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(surds())
def test_inverse_and_float(a):
    if a == 0:
        with pytest.raises(ZeroDivisionError):
            a.inverse()
        return
    assert a * a.inverse() == 1
    assert math.isclose(float(a.inverse()), 1 / float(a), rel_tol=1e-9, abs_tol=1e-12)


@given(surds(), surds())
def test_sign_matches_float(a, b):
    diff = a - b
    f = float(diff)
    if abs(f) > 1e-9:
        assert (a < b) == (f < 0)
    assert diff.sign() in (-1, 0, 1)


def test_sign_of_near_cancellation():
    # 2 * 99^2 = 19602 > 19600 = 140^2 and 577^2 = 332929 > 332928 = 2 * 408^2
    assert (99 * Surd.sqrt(2) - 140).sign() == 1
    assert (577 - 408 * Surd.sqrt(2)).sign() == 1
    assert (665857 - 470832 * Surd.sqrt(2)).sign() == 1


@given(surds())
def test_text_round_trip(a):
    assert Surd.parse(str(a)) == a


@given(fractions)
def test_rational_hash_matches_fraction(q):
    assert hash(Surd(q)) == hash(q)
    assert Surd(q) == q
    assert as_surd(q).to_fraction() == q
