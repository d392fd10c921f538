import random
from fractions import Fraction

import pytest
from flint import fmpq

from prb.balls import round_down
from prb.arith import Poly, RatFun, binomial, series_coefficients
from prb.errors import DomainError, PreconditionError
from prb.modulus import dominant_modulus
from prb.ratmajorant import bound_ratpoly, refine

from conftest import random_ratfun_case, z

one = Poly([1], "z")


def test_examples():
    assert bound_ratpoly(RatFun(one, 1 - z), 1 - z, 1).M == 1
    res = bound_ratpoly(RatFun(3 + z, one), 1 - z, 1)
    assert res.M == 3 and res.N0 == 2 and res.t == 0
    assert bound_ratpoly(RatFun(one, 1 - 2 * z), 1 - 2 * z, 2).M == 1


def test_preconditions():
    with pytest.raises(PreconditionError, match="majorant scale too small"):
        bound_ratpoly(RatFun(one, 1 - 2 * z), 1 - z, 1)
    with pytest.raises(PreconditionError, match="majorant scale too small"):
        bound_ratpoly(RatFun(one, (1 - z) ** 2), 1 - z, 1)
    with pytest.raises(DomainError):
        bound_ratpoly(RatFun(one, 1 - z), 1 - z, 0)
    with pytest.raises(PreconditionError):
        bound_ratpoly(RatFun(one, 1 - z), z ** 2, 1)


def test_refine_monotone():
    r = RatFun(one, 1 - z)
    s0 = bound_ratpoly(r, 1 - z, 2, refine=False)
    s1 = refine(s0, r)
    s2 = refine(s1, r)
    assert s0.M >= s1.M >= s2.M >= 1
    assert s2.N0 == 4 * s0.N0
    # refining twice lands where a single call with the doubled budget lands
    direct = bound_ratpoly(r, 1 - z, 2, refine=True, refine_limit=s1.N0)
    assert direct.M == refine(s1, r).M or direct.N0 <= s2.N0
    p = bound_ratpoly(RatFun(3 + z, one), 1 - z, 1, refine=False)
    assert refine(p, RatFun(3 + z, one)).M == p.M


def _frac(x):
    return x.numerator, x.denominator


def test_random_majorants_are_certified():
    rng = random.Random(7)
    checked = 0
    while checked < 200:
        r, P, m = random_ratfun_case(rng)
        try:
            res = bound_ratpoly(r, P, m)
        except PreconditionError:
            continue
        # a 48-bit dyadic lower bound on delta keeps the exact check cheap
        dlo = fmpq(*_frac(round_down(dominant_modulus(P).enclosure(128)[0], 48)))
        M = fmpq(*_frac(res.M))
        coeffs = series_coefficients(r, 1001)
        pw = fmpq(1)
        for k, c in enumerate(coeffs):
            assert abs(fmpq(c.numerator, c.denominator)) * pw <= M * binomial(k + m - 1, m - 1), (r, P, m, k)
            pw *= dlo
        checked += 1


def test_tail_bound_dominates_past_N0():
    rng = random.Random(9)
    from prb.ratmajorant import _t_value
    done = 0
    while done < 20:
        r, P, m = random_ratfun_case(rng)
        try:
            res = bound_ratpoly(r, P, m, refine=False)
        except PreconditionError:
            continue
        dlo, _ = dominant_modulus(P).enclosure(128)
        N0 = res.N0
        coeffs = series_coefficients(r, 10 * N0 + 1)
        prev = None
        for n in (N0, 2 * N0, 10 * N0):
            t = _t_value(res.terms, m, n, 64)
            if prev is not None:
                assert t <= prev * (1 + Fraction(1, 2 ** 60))  # up to output rounding
            prev = t
            assert abs(coeffs[n]) * dlo ** n <= t * binomial(n + m - 1, m - 1)
        done += 1
