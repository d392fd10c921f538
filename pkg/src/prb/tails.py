"""Bounds on tails of convergent D-finite series and truncation orders.

The tail of the ``j``-th derivative at ``z`` starting from index ``n`` is

    u^{(j)}_{n;}(z) = sum_{k >= n} [z^k] u^{(j)}  z^k,

so ``n = 0`` gives ``u^{(j)}(z)`` itself.  Bounds only depend on ``|z|``.
Three regimes are available and the smallest valid bound is reported:

* ``CLOSED_FORM`` (``kappa = T = 0``): the exact tail of the majorant, which is
  a negative binomial tail and is summed as a finite sum of positive terms;
* ``LARGE_N``: the saddle-point radius ``r_n`` and the geometric factor ``h``;
* ``SMALL_N``: a bound that does not depend on ``n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from flint import arb

from .arith import to_fraction
from .balls import ball, lower, precision, round_down, upper
from .dmajorant import MajorantSeries, derivative_at
from .errors import DomainError, PreconditionError
from .seqbounds import BoundParams

MAX_DERIVATIVE = 64
MAX_ORDER = 10 ** 9


class Regime(enum.Enum):
    CLOSED_FORM = "CLOSED_FORM"
    LARGE_N = "LARGE_N"
    SMALL_N = "SMALL_N"


@dataclass(frozen=True)
class TailQuery:
    params: BoundParams
    point_modulus: Fraction
    j: int = 0
    n: int = 0


@dataclass(frozen=True)
class TailEvaluation:
    regime: Regime
    r: Fraction | None
    h_value: Fraction | None
    bound: Fraction
    condn: bool = False  # whether the textbook large-n condition holds at this n


def _check(b: BoundParams, x: Fraction, j: int):
    if b.kappa > 0:
        raise DomainError("divergent series: no tail bound")
    if x < 0:
        raise DomainError("point modulus must be nonnegative")
    if not 0 <= j <= MAX_DERIVATIVE:
        raise DomainError(f"derivative order must be in [0, {MAX_DERIVATIVE}]")
    if b.kappa == 0 and b.A != 0:
        alo, _ = b.alpha_interval(b.bits)
        if x * alo >= 1:
            raise DomainError("point outside the disk of convergence")


def _alpha_hi(b: BoundParams, x: Fraction) -> Fraction:
    """Upper bound on alpha, refined until ``x alpha_hi < 1`` when that matters."""
    bits = b.bits
    while True:
        _, ahi = b.alpha_interval(bits)
        if b.kappa < 0 or x * ahi < 1:
            return ahi
        if bits > 4096:
            raise PreconditionError("point too close to the circle of convergence")
        bits *= 2


def _majorant(b: BoundParams, ahi: Fraction) -> MajorantSeries:
    return MajorantSeries(b.p_alpha, b.delta, b.T, b.K, b.A, b.bits)


def _deriv(b: BoundParams, r: Fraction, j: int, ahi: Fraction) -> arb:
    return derivative_at(_majorant(b, ahi), r, j, alpha=ball(ahi))


def _rn(b: BoundParams, n: int, ahi: Fraction) -> Fraction:
    """Dyadic point just below ``(1 - (K/(n+K+1))^(1/(T+1)))/alpha_hi``."""
    K, T = b.K, b.T
    x = arb(K) / (n + K + 1)
    root = x if T == 0 else (x.log() / (T + 1)).exp()
    r = lower((1 - root) / ball(ahi))
    return round_down(r, b.bits + 32) if r > 0 else Fraction(0)


def _closed_form(b: BoundParams, x: Fraction, j: int, n: int, ahi: Fraction) -> Fraction:
    """``sum_{k>=n} [z^k] v~^{(j)} x^k`` for ``T = 0``, ``kappa = 0``.

    ``v~^{(j)} = A alpha^j K^(j rising) (1 - alpha z)^-(K+j)`` and the tail of
    ``(1-y)^-L`` from ``n`` is ``(1-y)^-L sum_{i<L} C(n+L-1, i) (1-y)^i y^(n+L-1-i)``.
    """
    L = b.K + j
    a = ball(ahi)
    y = a * ball(x)
    one_y = 1 - y
    pre = b.A_ball * a ** j * math.prod(range(b.K, b.K + j))
    if x == 0:
        # only the constant term survives
        return upper(pre) if n == 0 else Fraction(0)
    total = arb(0)
    for i in range(L):
        total += math.comb(n + L - 1, i) * one_y ** i * y ** (n + L - 1 - i)
    return upper(pre * total / one_y ** L)


def _large_n(b: BoundParams, x: Fraction, j: int, n: int, ahi: Fraction):
    """Saddle-point bound, or ``None`` when the geometric factor is not valid."""
    r = _rn(b, n, ahi)
    if r <= 0:
        return None
    y = ball(x) / ball(r)
    p, q = b.p, b.q
    if p == 0:
        if not (y < 1):
            return None
        h = 1 / (1 - y)
    else:
        lim = arb(n + q) ** (-p)
        if not (y ** q < lim):
            return None
        s = sum((y ** u for u in range(q)), arb(0))
        h = s / (1 - y ** q / lim)
    val = _deriv(b, r, j, ahi) * b.normalizer.psi_inv(n) * y ** n * h
    return r, upper(h), upper(val)


def _small_n(b: BoundParams, x: Fraction, j: int, ahi: Fraction):
    p, q = b.p, b.q
    if p == 0:
        return x, None, upper(_deriv(b, x, j, ahi))
    inv = 1 / ahi
    r = (x + inv) / 2 if x < inv else inv / 2
    r = round_down(r, b.bits + 32)
    y = ball(x) / ball(r)
    s = sum((y ** u for u in range(q)), arb(0))
    if x == 0:
        e = arb(1)
    else:
        e = (arb(-p) / q * (y.log() * q / (-p)).exp()).exp()
    return r, None, upper(_deriv(b, r, j, ahi) * e * s)


def condn_holds(b: BoundParams, x: Fraction, n: int, ahi: Fraction | None = None) -> bool:
    """The textbook sufficient condition for the large-``n`` bound, evaluated verbatim."""
    ahi = ahi if ahi is not None else b.alpha_interval()[1]
    K, T, p, q = b.K, b.T, b.p, b.q
    ax = ball(ahi) * ball(x)
    if p == 0:
        if not (ax < 1):
            return False
        return bool(n > (1 - ax) ** (-T - 1) * K)
    if x == 0:
        return True
    e = arb(q) / (-p)
    base = (ax.log() * -e).exp()  # (alpha |z|)^(-q/p)
    inner = 1 - ((arb(K) / (base + K + 1)).log() / (T + 1)).exp()
    return bool(n > base * (inner.log() * (-e)).exp())


def _tail_series(b: BoundParams, x: Fraction, j: int, n: int, ahi: Fraction) -> TailEvaluation:
    """Tail bound for ``V = sum v~_k / psi_k z^k`` (no valuation shift)."""
    n = max(n, 0)
    cond = condn_holds(b, x, n, ahi)
    if b.kappa == 0 and b.T == 0:
        return TailEvaluation(Regime.CLOSED_FORM, None, None, _closed_form(b, x, j, n, ahi), cond)
    best = None
    if n > 0:
        ln = _large_n(b, x, j, n, ahi)
        if ln is not None:
            best = TailEvaluation(Regime.LARGE_N, ln[0], ln[1], ln[2], cond)
    r, h, val = _small_n(b, x, j, ahi)
    if best is None or val < best.bound:
        best = TailEvaluation(Regime.SMALL_N, r, h, val, cond)
    return best


def tail_bound(query: TailQuery) -> TailEvaluation:
    b, j, n = query.params, query.j, query.n
    x = to_fraction(query.point_modulus)
    _check(b, x, j)
    if n < 0:
        raise DomainError("negative start index")
    m = b.shift
    with precision(b.bits + 64):
        if b.A == 0 and not any(b.prefix):
            return TailEvaluation(Regime.CLOSED_FORM if b.kappa == 0 and b.T == 0 else Regime.SMALL_N,
                                  None, None, Fraction(0))
        ahi = _alpha_hi(b, x)
        total = Fraction(0)
        # explicit prefix sum_{i<m} u_i z^i: coefficient k of its derivative is (k+j)_j u_{k+j}
        for k in range(n, max(n, m - j)):
            total += math.perm(k + j, j) * b.prefix[k + j] * x ** k
        if b.A == 0:
            return TailEvaluation(Regime.CLOSED_FORM, None, None, total)
        # (z^m w)^(j) = sum_i C(j,i) m_(i) z^(m-i) w^(j-i)
        main = None
        for i in range(min(j, m) + 1):
            ev = _tail_series(b, x, j - i, n - m + i, ahi)
            if main is None:
                main = ev
            scale = math.comb(j, i) * math.perm(m, i) * x ** (m - i)
            total += scale * ev.bound
        return TailEvaluation(main.regime, main.r, main.h_value, total, main.condn)


def truncation_order(b: BoundParams, z, eps, j: int = 0) -> int:
    """Least ``N`` found by galloping then bisection with ``tail_bound(N) <= eps``.

    The returned ``N`` always satisfies the inequality; minimality is with
    respect to the search, which assumes the bound is eventually decreasing.
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    x = abs_point(z)

    def ok(N):
        return tail_bound(TailQuery(b, x, j, N)).bound <= eps

    if ok(0):
        return 0
    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > MAX_ORDER:
            raise PreconditionError("tail bound does not drop below eps: nonconvergence at this point")
    lo = hi // 2  # ok(lo) is false (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def abs_point(z) -> Fraction:
    """Exact ``|z|`` for real input, an upper bound for Gaussian rationals."""
    from .arith import GaussianRational
    if isinstance(z, GaussianRational):
        if z.im == 0:
            return abs(z.re)
        if z.re == 0:
            return abs(z.im)
        with precision(128):
            return upper(z.abs_arb())
    return abs(to_fraction(z))
