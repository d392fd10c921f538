"""Majorants ``r(z) << M (1 - z/delta)^(-m)`` for rational functions.

``delta`` is the dominant root modulus of a reference polynomial ``P_alpha``.
The constant ``M`` is the larger of two quantities.  The first is an exact
scan of the first ``N_0`` coefficient ratios.  The second bounds the
ratios past ``N_0`` using the partial fraction decomposition; ``N_0`` is
chosen so that this bound no longer increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from flint import arb

from .arith import Poly, RatFun, binomial, decompose, series_coefficients
from .balls import ball, lower, precision, round_up, upper
from .errors import DomainError, PreconditionError
from .modulus import Cmp, compare_moduli, dominant_modulus, modulus_of_core, root_abs_sum_upper

REFINE_LIMIT = 512


@dataclass(frozen=True)
class _Term:
    c: Fraction  # upper bound on sum over roots of |h zeta^-d|
    d: int
    i: int
    ratio: Fraction  # upper bound on delta(P_alpha)/delta(D_i); exactly 1 on the circle


@dataclass(frozen=True)
class RatMajorant:
    M: Fraction
    m: int
    p_alpha: Poly
    N0: int
    t: Fraction
    h: Fraction
    terms: tuple
    poly_degree: int
    delta_hi: Fraction
    bits: int

    def bound(self, n: int) -> Fraction:
        """``M * C(n+m-1, m-1)``; multiply by ``delta^-n`` for the coefficient bound."""
        return self.M * binomial(n + self.m - 1, self.m - 1)


def _t_value(terms, m: int, n: int, bits: int) -> Fraction:
    if not terms:
        return Fraction(0)
    with precision(bits + 16):
        total = arb(0)
        cm = binomial(n + m - 1, m - 1)
        for tm in terms:
            f = ball(tm.c) * binomial(n + tm.d - 1, tm.d - 1) / cm
            if tm.ratio != 1:
                f = f * ball(tm.ratio) ** n
            total += f
        return upper(total)


def _h_value(coeffs, m: int, delta_hi: Fraction, start: int, stop: int, bits: int) -> Fraction:
    best = Fraction(0)
    with precision(bits + 16):
        dh = ball(delta_hi)
        for n in range(start, stop):
            rn = coeffs[n]
            if rn == 0:
                continue
            v = ball(abs(rn)) * dh ** n / binomial(n + m - 1, m - 1)
            best = max(best, upper(v))
    return best


def bound_ratpoly(r: RatFun, p_alpha: Poly, m: int, bits: int = 64,
                  refine: bool = True, exact_roots: bool = True,
                  refine_limit: int = REFINE_LIMIT) -> RatMajorant:
    """Certified ``M`` with ``|r_n| <= M C(n+m-1, m-1) delta(P_alpha)^-n`` for all ``n``."""
    if m < 1:
        raise DomainError("m must be at least 1")
    if r.den[0] == 0:
        raise DomainError("rational function has a pole at 0")
    dP = dominant_modulus(p_alpha)
    if dP.infinite:
        raise PreconditionError("majorant scale too small: P_alpha has no nonzero root")
    dlo, dhi = dP.enclosure(bits)
    A, proper = r.split()
    deg_A = A.degree() if not A.is_zero() else -1
    terms = []
    N0 = max(1, deg_A + 1)
    if not proper.is_zero():
        pf = decompose(r)
        for Di, i in pf.factors:
            mod_i = modulus_of_core(Di.normalized())
            c = compare_moduli(dP, mod_i)
            if c is Cmp.GT:
                raise PreconditionError(
                    "majorant scale too small: delta(P_alpha) exceeds a pole modulus")
            if c is Cmp.EQ:
                if i > m:
                    raise PreconditionError(
                        f"majorant scale too small: pole of order {i} on the circle but m = {m}")
                ratio = Fraction(1)
            else:
                b = bits
                while True:
                    plo, phi = dP.enclosure(b)
                    qlo, _ = mod_i.enclosure(b)
                    if phi < qlo:
                        ratio = phi / qlo
                        break
                    b *= 2
                if i > m:
                    with precision(bits + 16):
                        lg = (ball(1 / ratio)).log()
                        need = ball(i - m) / lg
                        N0 = max(N0, math.ceil(upper(need)))
            for d in range(1, i + 1):
                h = pf.h[(i, d)]
                if h.is_zero():
                    continue
                if exact_roots:
                    cval = root_abs_sum_upper(h, Di, d, bits)
                else:
                    from .modulus import root_abs_sum_upper_coarse
                    cval = root_abs_sum_upper_coarse(h, Di, d, bits)
                terms.append(_Term(cval, d, i, ratio))
    terms = tuple(terms)
    coeffs = series_coefficients(r, N0)
    h = _h_value(coeffs, m, dhi, 0, N0, bits)
    t = _t_value(terms, m, N0, bits)
    state = RatMajorant(round_up(max(h, t), 64), m, p_alpha, N0, t, h, terms, deg_A, dhi, bits)
    if refine:
        while state.N0 <= refine_limit and state.t > state.h:
            state = refine_majorant(state, r)
    return state


def refine_majorant(state: RatMajorant, r: RatFun) -> RatMajorant:
    """Double ``N_0``: scan more exact coefficients, evaluate the tail bound further out."""
    N1 = 2 * state.N0
    coeffs = series_coefficients(r, N1)
    h = max(state.h, _h_value(coeffs, state.m, state.delta_hi, state.N0, N1, state.bits))
    t = _t_value(state.terms, state.m, N1, state.bits)
    M = min(state.M, round_up(max(h, t), 64))
    return RatMajorant(M, state.m, state.p_alpha, N1, t, h, state.terms,
                       state.poly_degree, state.delta_hi, state.bits)

refine = refine_majorant
