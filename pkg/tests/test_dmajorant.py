import math
import random
from fractions import Fraction

import pytest
from flint import arb

from prb.arith import Poly, binomial
from prb.balls import ball, precision
from prb.dmajorant import (K_POLICIES, MajorantSeries, bound_normal_diffeq, choose_K, constant_prefix,
                           derivative_at, majorant_coefficient, n2_condition, normal_form, omega)
from prb.errors import PreconditionError
from prb.growth import asympt, normalized_diffeq
from prb.modulus import dominant_modulus
from prb.operators import DiffOperatorTheta, unroll
from prb.seqbounds import _NormalizedPrefix

from conftest import APERY, EX1A, INVOLUTIONS, z

# (1 - z) theta - z annihilates 1/(1 - z)
D_GEOM = DiffOperatorTheta([-z, 1 - z])


def _ms(P, T, K, A):
    return MajorantSeries(P, dominant_modulus(P), T, K, Fraction(A))


def test_geometric_example():
    v = bound_normal_diffeq(D_GEOM, 1 - z, constant_prefix([1] * 64))
    assert (v.T, v.K, v.A) == (0, 2, 1)
    assert v.M == 1 and v.N2 == 1
    assert bound_normal_diffeq(D_GEOM, 1 - z, constant_prefix([]), k_policy="doubled").A == 0


def test_regular_point_required():
    with pytest.raises(PreconditionError, match="0 should be a regular point"):
        bound_normal_diffeq(DiffOperatorTheta([-z, z]), 1 - z, constant_prefix([1]))
    with pytest.raises(PreconditionError):
        bound_normal_diffeq(D_GEOM, 1 - z / 2, constant_prefix([1]))


def test_majorant_coefficient_examples():
    lo, hi = majorant_coefficient(_ms(1 - z, 0, 2, 1), 5)
    assert lo <= 6 <= hi and hi - lo < Fraction(1, 10 ** 10)
    lo, hi = majorant_coefficient(_ms(1 - z / 2, 0, 1, 3), 3)
    assert lo <= Fraction(3, 8) <= hi
    # [y^4] exp(1/(1-y)) = e * sum_k C(3, k-1)/k! = e * 73/24
    assert omega(1, 1, 4) == Fraction(73, 24)
    lo, hi = majorant_coefficient(_ms(1 - z, 1, 1, 1), 4, bits=128)
    with precision(200):
        ref = arb(1).exp() * 73 / 24
        assert ball(lo) <= ref <= ball(hi)


@pytest.mark.parametrize("T,K", [(1, 1), (1, 3), (2, 2), (3, 5)])
def test_omega_matches_power_series_composition(T, K):
    # exp(f) with f = (K/T)((1-y)^(-T) - 1), composed termwise to order 8
    N = 8
    f = [Fraction(K, T) * binomial(n + T - 1, n) for n in range(N)]
    f[0] = Fraction(0)
    e = [Fraction(1)] + [Fraction(0)] * (N - 1)
    term = e[:]
    for k in range(1, N):
        nxt = [Fraction(0)] * N
        for a in range(N):
            for b in range(N - a):
                nxt[a + b] += term[a] * f[b]
        term = [x / k for x in nxt]
        e = [x + y for x, y in zip(e, term)]
    assert [omega(T, K, n) for n in range(N)] == e


@pytest.mark.parametrize("T,K,j", [(0, 2, 0), (0, 3, 2), (1, 1, 0), (1, 2, 3), (2, 1, 1)])
def test_derivative_at_matches_series(T, K, j):
    v = _ms(1 - 2 * z, T, K, Fraction(3, 2))
    x = Fraction(1, 5)
    with precision(128):
        d = derivative_at(v, x, j)
        s = arb(0)
        for n in range(j, 400):
            lo, hi = majorant_coefficient(v, n, 128)
            s += ball(lo) * math.perm(n, j) * ball(x) ** (n - j)
        assert d.overlaps(s) or d > s
        assert (d - s) / d < arb(10) ** -20


def test_involutions_irregular():
    g = asympt(INVOLUTIONS)
    D = normalized_diffeq(INVOLUTIONS, g.kappa)
    v = bound_normal_diffeq(D, g.p_alpha, constant_prefix([1, 1]))
    assert v.T == 1


def test_n2_minimal():
    for R in (EX1A, INVOLUTIONS, APERY):
        g = asympt(R)
        D = normalized_diffeq(R, g.kappa)
        v = bound_normal_diffeq(D, g.p_alpha, constant_prefix([1] * R.order))
        cs, _ = normal_form(D)
        eps = v.M * v.delta.enclosure(64)[1] / v.K
        assert n2_condition(cs, D.order, eps, v.N2)
        assert v.N2 == 1 or not n2_condition(cs, D.order, eps, v.N2 - 1)
        assert v.N2 // 2 == 0 or not n2_condition(cs, D.order, eps, v.N2 // 2)


def test_choose_K():
    assert choose_K(Fraction(1), Fraction(1)) == 2
    assert choose_K(Fraction(1), Fraction(1), "doubled") == 2
    assert choose_K(Fraction(7), Fraction(1)) == 8
    assert choose_K(Fraction(7), Fraction(1), "doubled") == 14
    assert choose_K(Fraction(0), Fraction(1)) == 1
    with pytest.raises(ValueError):
        choose_K(Fraction(1), Fraction(1), "loose")


@pytest.mark.parametrize("policy", K_POLICIES)
@pytest.mark.parametrize("R,init", [(EX1A, [1, 1, 1]), (INVOLUTIONS, [1, 1]), (APERY, [1, 5])])
def test_majorant_dominates_normalized_sequence(policy, R, init):
    g = asympt(R)
    D = normalized_diffeq(R, g.kappa)
    src = _NormalizedPrefix(R, init, g.normalizer, False, 128)
    v = bound_normal_diffeq(D, g.p_alpha, src, k_policy=policy)
    assert v.K > v.M * v.delta.enclosure(64)[0]
    for n, w in enumerate(src(301)):
        assert w <= majorant_coefficient(v, n)[1]


def _lemma_lhs(Ms, r, T, n, j):
    return sum(Mk * binomial(n - 1 - j + r - k + T - 1, r - k + T - 1) * j ** k for k, Mk in enumerate(Ms))


def test_order_reduction_inequality():
    rng = random.Random(4)
    for _ in range(60):
        r, T = rng.randint(1, 4), rng.randint(0, 3)
        Ms = [Fraction(rng.randint(0, 20), rng.randint(1, 5)) for _ in range(r)]
        M = max(Mk / binomial(r - 1, k) for k, Mk in enumerate(Ms))
        for n in range(1, 51):
            for j in range(n):
                assert _lemma_lhs(Ms, r, T, n, j) <= M * n ** (r - 1) * binomial(n - 1 - j + T, T)
