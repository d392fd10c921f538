import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from prb.arith import GaussianRational, Poly
from prb.errors import DomainError, PreconditionError
from prb.operators import (DiffOperatorTheta, RecOperator, check_shape, newton_polygon,
                           shift_valuation, symmetric_product, unroll, unroll_bounds)

from conftest import CORPUS, EX1A, INVOLUTIONS, n, rec, z


def test_unroll_known_sequences():
    assert unroll(INVOLUTIONS, [1, 1], 10) == [1, 1, 2, 4, 10, 26, 76, 232, 764, 2620]
    fib = rec(1, 1, -1)
    assert unroll(fib, [0, 1], 10) == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
    # 1/n! from (n+1) u_{n+1} = u_n
    vals = unroll(rec(-1, n + 1), [1], 6)
    assert vals == [Fraction(1, f) for f in (1, 1, 2, 6, 24, 120)]


def test_unroll_complex_and_errors():
    i = GaussianRational(Fraction(0), Fraction(1))
    vals = unroll(rec(-1, 1), [i], 3)
    assert all(v == i for v in vals)
    with pytest.raises(DomainError):
        unroll(INVOLUTIONS, [1], 5)
    with pytest.raises(PreconditionError):
        unroll(rec(1, n - 2), [1], 5)


def test_unroll_bounds_dominate():
    rng = random.Random(3)
    for _ in range(20):
        init = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
        bounds = unroll_bounds(EX1A, [abs(x) for x in init], 40)
        vals = unroll(EX1A, init, 40)
        assert all(abs(v) <= b for v, b in zip(vals, bounds))


def test_operator_product_acts_by_composition():
    rng = random.Random(5)
    for _ in range(10):
        A = rec(*[Poly([Fraction(rng.randint(-3, 3)) for _ in range(2)], "n") for _ in range(3)])
        B = rec(*[Poly([Fraction(rng.randint(-3, 3)) for _ in range(2)], "n") for _ in range(2)])
        u = [Fraction(rng.randint(-5, 5)) for _ in range(12)]
        Bu = [B.apply(u, k) for k in range(12 - B.order)]
        for k in range(12 - A.order - B.order):
            assert (A * B).apply(u, k) == A.apply(Bu, k)


def test_shape_and_valuation():
    R = rec(0, 0, n + 1, n)
    info = check_shape(R)
    assert info.valuation == 2 and info.order == 3
    assert not info.nonsingular and info.singular_roots == (0,)
    Rs = shift_valuation(R)
    assert Rs.order == 1 and Rs[0] == n + 1 and Rs[1] == n
    assert shift_valuation(rec(0, 0, -n, 0, n)) == rec(-n, 0, n)
    assert not check_shape(rec(n, 1)).reversible


def test_newton_polygon():
    P = newton_polygon(EX1A)
    assert [e.slope for e in P.edges] == [1, Fraction(-1, 2)]
    assert P.kappa == Fraction(1, 2)
    assert newton_polygon(INVOLUTIONS).kappa == Fraction(1, 2)
    assert newton_polygon(rec(1, n + 1)).kappa == -1
    with pytest.raises(DomainError):
        newton_polygon(rec(0, n))


@pytest.mark.parametrize("name,R,init,_", CORPUS[:3] + CORPUS[4:5])
def test_symmetric_product_annihilates(name, R, init, _):
    other = rec(-(n + 2), n + 1)  # u_n = n + 1
    P = symmetric_product(R, other)
    x = unroll(R, init, 30)
    prod = [a * (k + 1) for k, a in enumerate(x)]
    assert all(P.apply(prod, k) == 0 for k in range(30 - P.order))


def test_symmetric_product_random_pairs():
    rng = random.Random(11)
    for _ in range(8):
        A = rec(*[Poly([Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-2, 2))], "n") for _ in range(2)],
                n + rng.randint(1, 3))
        B = rec(Poly([Fraction(rng.randint(1, 4))], "n"), n + rng.randint(1, 3))
        P = symmetric_product(A, B)
        x = unroll(A, [1, 2], 25)
        y = unroll(B, [3], 25)
        xy = [a * b for a, b in zip(x, y)]
        assert all(P.apply(xy, k) == 0 for k in range(25 - P.order))
        assert P.order <= 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=1, max_size=3), min_size=1, max_size=3),
       st.lists(st.lists(st.integers(-4, 4), min_size=1, max_size=3), min_size=1, max_size=3),
       st.lists(st.integers(-6, 6), min_size=10, max_size=10))
def test_theta_product_is_composition(a, b, u):
    A = _theta(a)
    B = _theta(b)
    if A is None or B is None:
        return
    u = [Fraction(x) for x in u]
    assert (A * B).apply_series(u) == A.apply_series(B.apply_series(u))


def _theta(rows):
    cs = [Poly([Fraction(x) for x in r], "z") for r in rows]
    if all(c.is_zero() for c in cs):
        return None
    return DiffOperatorTheta(cs)


def test_theta_action():
    theta = DiffOperatorTheta([Poly([], "z"), Poly([1], "z")])
    assert theta.apply_series([5, 1, 1, 1]) == [0, 1, 2, 3]
    zt = DiffOperatorTheta([z])
    assert zt.apply_series([1, 2, 3]) == [0, 1, 2]
