from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from prb.arith import (GaussianRational, Poly, RatFun, decompose, partial_fractions, power_sums,
                       series_coefficients, squarefree_factorize)
from prb.balls import dyadic_hex, parse_dyadic_hex, round_up, decimal_up, decimal_down
from prb.errors import DomainError

z = Poly.gen("z")
one = Poly([1], "z")


def P(*cs):
    return Poly([Fraction(c) for c in cs], "z")


def test_squarefree_examples():
    F = squarefree_factorize((1 - z) ** 2 * (1 - 2 * z))
    assert F.factors == ((1 - 2 * z, 1), (1 - z, 2))
    assert squarefree_factorize(1 - z).factors == ((1 - z, 1),)
    assert squarefree_factorize(z ** 2 - 34 * z + 1).factors[0][1] == 1
    assert len(squarefree_factorize(z ** 2 - 34 * z + 1).factors) == 1


def test_squarefree_rejects_zero():
    with pytest.raises(DomainError):
        squarefree_factorize(Poly([], "z"))


def _reconstructs(num, den):
    r = RatFun(num, den)
    pf = decompose(r)
    # agreement on deg(den) + deg(num) + 1 coefficients forces equality of
    # two rational functions whose denominators divide den
    N = r.den.degree() + max(r.num.degree(), 0) + 2
    ref = series_coefficients(r, N)
    return all(pf.coefficient(k) == ref[k] for k in range(N))


def test_partial_fractions_examples():
    assert _reconstructs(one, (1 - z) * (1 - 2 * z))
    assert _reconstructs(z, (1 - z) ** 2)
    pf = partial_fractions(one, squarefree_factorize(1 - z))
    # 1/(1-z) = h/(zeta - z) at zeta = 1, so h = 1
    assert pf.h[(1, 1)] == Poly([1], "z")


def test_partial_fractions_improper():
    with pytest.raises(DomainError):
        partial_fractions(z ** 2, squarefree_factorize(1 - z))


small = st.integers(-4, 4)


@st.composite
def proper_fractions(draw):
    # denominator from a few small factors with multiplicities
    den = one
    for _ in range(draw(st.integers(1, 3))):
        f = P(1, *draw(st.lists(small, min_size=1, max_size=2)))
        if f.degree() < 1:
            continue
        den = den * f ** draw(st.integers(1, 3))
    if den.degree() < 1 or den.degree() > 8:
        den = (1 - z) * (1 + 2 * z)
    num = P(*draw(st.lists(small, min_size=1, max_size=den.degree())))
    if num.is_zero():
        num = one
    return num, den


@settings(max_examples=60, deadline=None)
@given(proper_fractions())
def test_partial_fractions_reconstruct(pair):
    assert _reconstructs(*pair)


def test_series_coefficients():
    assert series_coefficients(RatFun(one, 1 - z), 4) == [1, 1, 1, 1]
    assert series_coefficients(RatFun(one, 1 - 2 * z), 4) == [1, 2, 4, 8]
    assert series_coefficients(RatFun(3 + z, one), 4) == [3, 1, 0, 0]
    with pytest.raises(DomainError):
        series_coefficients(RatFun(one, z), 3)


@settings(max_examples=40, deadline=None)
@given(proper_fractions())
def test_series_satisfies_denominator_recurrence(pair):
    num, den = pair
    cs = series_coefficients(RatFun(num, den), 20)
    d = den.coeffs()
    for k in range(len(d) + len(num.coeffs()), 20):
        assert sum(d[j] * cs[k - j] for j in range(len(d))) == 0


def test_power_sums():
    # roots 1, 2, 3
    f = (z - 1) * (z - 2) * (z - 3)
    assert power_sums(f, 3) == [3, 6, 14, 36]


def test_gaussian_arithmetic():
    a = GaussianRational(Fraction(1, 2), Fraction(3))
    b = GaussianRational(Fraction(-1), Fraction(1, 3))
    assert a * b == GaussianRational(Fraction(-1, 2) - 1, Fraction(1, 6) - 3)
    assert (a / b) * b == a
    assert a.norm() == Fraction(37, 4)
    assert str(GaussianRational(Fraction(1, 2), Fraction(3))) == "1/2+3*i"


def test_ratfun_normal_form():
    r = RatFun(2 * (1 - z), 4 * (1 - z) * (1 + z))
    assert r.den.lc() == 1
    assert r.num.degree() == 0


@given(st.fractions(min_value=-1000, max_value=1000))
def test_dyadic_hex_roundtrip(x):
    d = round_up(x, 64)
    assert d >= x
    assert parse_dyadic_hex(dyadic_hex(d)) == d


def test_decimal_rounding():
    x = Fraction(1, 3)
    assert Fraction(decimal_up(x, 5)) >= x
    assert Fraction(decimal_down(x, 5)) <= x
    assert decimal_up(Fraction(12, 1), 2) == "12"
