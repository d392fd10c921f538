"""First-order majorant series for solutions of Euler-derivative equations.

Given ``D`` regular at the origin, a reference polynomial ``P_alpha`` and a
source of coefficient bounds for a particular solution ``w``, compute
``(T, K, A)`` such that ``w << v`` where

    v(z) = A (1 - alpha z)^(-K)                  if T = 0,
    v(z) = A exp((K/T) (1 - alpha z)^(-T))       if T > 0,

with ``alpha = 1/delta(P_alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Sequence

from flint import arb, fmpq_poly

from .arith import Poly, RatFun, binomial, squarefree_factorize
from .balls import ball, lower, precision, round_up, upper
from .errors import PreconditionError
from .modulus import AlgebraicModulus, Cmp, compare_moduli, dominant_modulus, modulus_of_core
from .operators import DiffOperatorTheta
from .ratmajorant import REFINE_LIMIT, bound_ratpoly

SeriesPrefixSource = Callable[[int], Sequence[Fraction]]


class ListPrefix:
    """Prefix source backed by a list of upper bounds, extended on demand."""

    def __init__(self, extend: Callable[[int], Sequence[Fraction]]):
        self._extend = extend
        self._cache: list[Fraction] = []

    def __call__(self, n: int) -> list[Fraction]:
        if len(self._cache) < n:
            self._cache = list(self._extend(n))
        return self._cache[:n]


def constant_prefix(values: Sequence[Fraction]) -> SeriesPrefixSource:
    vals = [abs(Fraction(v)) for v in values]

    def source(n):
        return vals[:n] + [Fraction(0)] * max(0, n - len(vals))

    return source


@dataclass(frozen=True)
class MajorantSeries:
    p_alpha: Poly
    delta: AlgebraicModulus
    T: int
    K: int
    A: Fraction
    bits: int = 64
    M: Fraction = Fraction(0)
    N2: int = 0

    def alpha_interval(self, bits: int | None = None) -> tuple[Fraction, Fraction]:
        lo, hi = self.delta.enclosure(bits or self.bits)
        return 1 / hi, 1 / lo

    @cached_property
    def A_ball(self) -> arb:
        return ball(self.A)

    def alpha_ball(self, bits: int | None = None) -> arb:
        return self.delta.reciprocal_ball(bits or self.bits)

    def with_A(self, A: Fraction) -> "MajorantSeries":
        return MajorantSeries(self.p_alpha, self.delta, self.T, self.K, A, self.bits, self.M, self.N2)

    def with_K(self, K: int) -> "MajorantSeries":
        return MajorantSeries(self.p_alpha, self.delta, self.T, K, self.A, self.bits, self.M, self.N2)


# ---------------------------------------------------------------------------
# Coefficients of exp((K/T)(1-y)^(-T)) / exp(K/T)

@lru_cache(maxsize=64)
def _scaled_table(T: int, K: int) -> list[int]:
    return [1]


def _scaled_omega(T: int, K: int, n: int) -> int:
    """``W_n = n! T^n omega_n``, an integer.

    From ``(m+1) omega_{m+1} = K omega_m - sum_i b_i j omega_j`` with
    ``b_i = (-1)^i C(T+1, i)`` and ``j = m+1-i`` one gets
    ``W_{m+1} = K T W_m - sum_i b_i j T^i (m!/j!) W_j``.
    """
    tab = _scaled_table(T, K)
    b = [binomial(T + 1, i) * (-1) ** i for i in range(T + 2)]
    while len(tab) <= n:
        m = len(tab) - 1
        acc = K * T * tab[m]
        falling = 1  # m!/j!
        for i in range(1, T + 2):
            j = m + 1 - i
            if j < 0:
                break
            if i > 1:
                falling *= j + 1
            acc -= b[i] * j * T ** i * falling * tab[j]
        tab.append(acc)
    return tab[n]


def omega(T: int, K: int, n: int) -> Fraction:
    """``[y^n] exp((K/T)((1-y)^(-T) - 1))`` as an exact rational."""
    return Fraction(_scaled_omega(T, K, n), math.factorial(n) * T ** n)


def unit_coefficient(T: int, K: int, n: int) -> arb:
    """Ball for ``[y^n]`` of the majorant with ``A = 1`` and ``alpha = 1``."""
    if T == 0:
        return arb(binomial(n + K - 1, K - 1))
    e = (arb(K) / T).exp()
    return e * arb(_scaled_omega(T, K, n)) / (arb.fac_ui(n) * arb(T) ** n)


def unit_coefficients(T: int, K: int, N: int) -> list[arb]:
    """``unit_coefficient(T, K, n)`` for ``n < N``, computed incrementally."""
    out = []
    if T == 0:
        c = arb(1)
        for n in range(N):
            out.append(c)
            c = c * (n + K) / (n + 1)
        return out
    _scaled_omega(T, K, max(N - 1, 0))
    tab = _scaled_table(T, K)
    e = (arb(K) / T).exp()
    den = arb(1)
    for n in range(N):
        out.append(e * arb(tab[n]) / den)
        den = den * ((n + 1) * T)
    return out


def majorant_coefficient(v: MajorantSeries, n: int, bits: int | None = None) -> tuple[Fraction, Fraction]:
    """Certified enclosure ``[lo, hi]`` of ``v_n``."""
    if v.A == 0:
        return Fraction(0), Fraction(0)
    bits = bits or v.bits
    alo, ahi = v.alpha_interval(bits)
    with precision(bits + 32):
        u = unit_coefficient(v.T, v.K, n)
        A = v.A_ball
        lo = A * ball(alo) ** n * u
        hi = A * ball(ahi) ** n * u
        return lower(lo), upper(hi)


def majorant_coefficient_ball(v: MajorantSeries, n: int) -> arb:
    """Ball version at the current precision (upper end uses the upper alpha)."""
    alo, ahi = v.alpha_interval()
    u = unit_coefficient(v.T, v.K, n)
    return v.A_ball * arb(ball(alo).lower()).union(arb(ball(ahi).upper())) ** n * u


# ---------------------------------------------------------------------------
# Derivatives of v at a real point

@lru_cache(maxsize=256)
def _derivative_polys(T: int, K: int, j: int) -> tuple:
    """Polynomials ``P_i`` with ``d^i/dy^i F = P_i(w) F``, ``w = 1/(1-y)``, ``alpha = 1``.

    ``F = exp((K/T) w^T)`` for ``T > 0`` and ``F = w^K`` for ``T = 0``.
    """
    P = fmpq_poly([1])
    out = [P]
    w = fmpq_poly([0, 1])
    for _ in range(j):
        dP = P.derivative() * w * w
        if T == 0:
            P = dP + P * K * w
        else:
            P = dP + P * K * w ** (T + 1)
        out.append(P)
    return tuple(out)


def derivative_at(v: MajorantSeries, x, j: int, alpha: arb | None = None) -> arb:
    """Ball containing ``v^{(j)}(x)`` for real ``0 <= x < 1/alpha``.

    The result is computed with the upper end of ``alpha`` so that it
    dominates the true value (all coefficients are nonnegative).
    """
    if v.A == 0:
        return arb(0)
    a = alpha if alpha is not None else arb(ball(v.alpha_interval()[1]).upper())
    y = a * ball(x)
    if not (y < 1):
        raise PreconditionError("evaluation point outside the disk of convergence")
    w = 1 / (1 - y)
    P = _derivative_polys(v.T, v.K, j)[j]
    pw = arb(0)
    for c in reversed(P.coeffs()):
        pw = pw * w + arb(c)
    if v.T == 0:
        F = w ** v.K
    else:
        F = (arb(v.K) / v.T * w ** v.T).exp()
    return v.A_ball * a ** j * pw * F


# ---------------------------------------------------------------------------
# The main algorithm

def _irregularity(D: DiffOperatorTheta, dP: AlgebraicModulus, parts) -> int:
    r = D.order
    T = 0
    for k, at in enumerate(parts):
        if at.is_zero():
            continue
        den = at.den
        if den.is_constant():
            continue
        mk = 0
        for f, mult in squarefree_factorize(den).factors:
            if compare_moduli(modulus_of_core(f.normalized()), dP) is Cmp.EQ:
                mk = max(mk, mult)
        T = max(T, mk - r + k)
    return T


def normal_form(D: DiffOperatorTheta):
    """``c_k = (a_k/a_r)(0)`` and ``atilde_k = (a_k/a_r - c_k)/z`` for ``k < r``."""
    r = D.order
    lead = D[r]
    if lead[0] == 0:
        raise PreconditionError("0 should be a regular point")
    z = Poly.gen("z")
    cs, parts = [], []
    for k in range(r):
        ak = D[k]
        ck = ak[0] / lead[0]
        num = ak - lead * ck
        q, rem = divmod(num, z)
        if not rem.is_zero():
            raise PreconditionError("internal: numerator not divisible by z")
        cs.append(ck)
        parts.append(RatFun(q, lead))
    return cs, parts


K_POLICIES = ("tight", "doubled")


def choose_K(M: Fraction, delta_hi: Fraction, policy: str = "tight") -> int:
    """Integer ``K`` with ``K > M delta`` (``tight``) or ``K >= 2 M delta`` (``doubled``)."""
    if policy == "tight":
        return math.floor(M * delta_hi) + 1
    if policy == "doubled":
        return max(1, math.ceil(2 * M * delta_hi))
    raise ValueError(f"unknown K policy {policy!r}")


def bound_normal_diffeq(D: DiffOperatorTheta, p_alpha: Poly, w: SeriesPrefixSource,
                        bits: int = 64, k_policy: str = "tight",
                        refine_limit: int = REFINE_LIMIT) -> MajorantSeries:
    """Majorant ``(T, K, A)`` for the solution of ``D`` whose coefficients ``w`` bounds.

    Any integer ``K > M delta`` makes the induction go through; ``tight``
    takes the least one (unless ``N_2`` would blow up, see :func:`_cap_N2`),
    ``doubled`` the least ``K >= 2 M delta``, which keeps ``N_2`` small at
    the price of a larger polynomial factor.
    """
    r = D.order
    dP = dominant_modulus(p_alpha)
    if dP.infinite:
        raise PreconditionError("P_alpha must have a nonzero root")
    lead = D[r]
    if lead[0] == 0:
        raise PreconditionError("0 should be a regular point")
    if compare_moduli(dominant_modulus(lead), dP) is Cmp.LT:
        raise PreconditionError("the equation has singularities closer than delta(P_alpha)")
    cs, parts = normal_form(D)
    T = _irregularity(D, dP, parts)
    M = Fraction(0)
    for k, at in enumerate(parts):
        if at.is_zero():
            continue
        Mk = bound_ratpoly(at, p_alpha, T + r - k, bits=bits, refine_limit=refine_limit).M
        M = max(M, Mk / binomial(r - 1, k))
    _, dhi = dP.enclosure(bits)
    K = choose_K(M, dhi, k_policy)
    N2 = _find_N2(cs, r, M * dhi / K)
    if k_policy == "tight":
        K, N2 = _cap_N2(cs, r, M * dhi, K, N2)
    A = _fit_A(w, T, K, dP, N2, bits)
    return MajorantSeries(p_alpha, dP, T, K, A, bits, M, N2)


def n2_condition(cs: Sequence[Fraction], r: int, eps: Fraction, N: int) -> bool:
    lhs = sum((abs(c) * N ** k for k, c in enumerate(cs)), Fraction(0))
    return lhs < (1 - eps) * N ** r


def _find_N2(cs, r, eps) -> int:
    N = 1
    while not n2_condition(cs, r, eps, N):
        N *= 2
    lo, hi = N // 2, N
    # least N in (lo, hi] satisfying the (monotone) condition
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if n2_condition(cs, r, eps, mid):
            hi = mid
        else:
            lo = mid
    return hi


N2_BUDGET = 2048


def _cap_N2(cs, r, Md, K, N2):
    """Raise ``K`` when ``K`` barely exceeds ``M delta`` and ``N_2`` explodes.

    ``N_2`` decreases with ``K``.  The least ``K`` is kept unless its
    ``N_2`` is above both ``N2_BUDGET`` and eight times the ``N_2`` of the
    doubled choice; otherwise bisect for the least ``K`` meeting that budget.
    """
    Kd = max(K, math.ceil(2 * Md))
    N2d = _find_N2(cs, r, Md / Kd)
    budget = max(N2_BUDGET, 8 * N2d)
    if N2 <= budget:
        return K, N2
    lo, hi = K, Kd  # N2(lo) > budget >= N2(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _find_N2(cs, r, Md / mid) <= budget:
            hi = mid
        else:
            lo = mid
    return hi, _find_N2(cs, r, Md / hi)


def _fit_A(w: SeriesPrefixSource, T: int, K: int, dP: AlgebraicModulus, N2: int, bits: int) -> Fraction:
    vals = w(N2 + 1)
    if all(x == 0 for x in vals):
        return Fraction(0)
    lo_d, hi_d = dP.enclosure(bits)
    alo = 1 / hi_d
    prec = bits
    while True:
        with precision(prec + 16):
            a = ball(alo)
            best = arb(0)
            an = arb(1)
            for x, u in zip(vals, unit_coefficients(T, K, len(vals))):
                if x != 0:
                    vn = arb((an * u).lower())
                    best = best.max(ball(x) / vn)
                an = an * a
            A = upper(best)
            if best.rel_accuracy_bits() >= 12 or prec >= 4096:
                return round_up(A, 64)
        prec *= 2
