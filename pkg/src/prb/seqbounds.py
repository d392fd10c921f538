"""End-to-end coefficient bounds for P-recursive sequences.

``bound_rec`` returns parameters ``(kappa, P_alpha, T, K, A)`` such that

    |u_n| <= q^(p n/q) Gamma(n/q + 1)^p  v~_n        (kappa = p/q)

where ``v~`` is the majorant series built in :mod:`prb.dmajorant`.  The
remaining functions evaluate that bound, relax it through the saddle-point
estimate, and package it as a human-readable formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from flint import arb

from .arith import GaussianRational, Poly, to_fraction
from .balls import ball, decimal_up, precision, round_up, upper
from .dmajorant import MajorantSeries, bound_normal_diffeq, unit_coefficient
from .errors import DomainError, PreconditionError
from .growth import GrowthData, NormalizerSpec, asympt, normalized_diffeq
from .modulus import AlgebraicModulus, Cmp, compare_polys
from .ratmajorant import REFINE_LIMIT
from .operators import (DiffOperatorTheta, RecOperator, check_shape, shift_valuation, unroll,
                        unroll_balls, unroll_bounds)


@dataclass(frozen=True)
class BoundParams:
    kappa: Fraction
    p_alpha: Poly
    delta: AlgebraicModulus
    T: int
    K: int
    A: Fraction
    shift: int = 0
    prefix: tuple = ()
    majorant: MajorantSeries | None = None
    bits: int = 64
    recurrence: RecOperator | None = None
    diffeq: DiffOperatorTheta | None = None

    @cached_property
    def A_ball(self) -> arb:
        """``A`` as an exact ball, converted once (``A`` can have a huge exponent)."""
        return ball(self.A)

    @property
    def p(self) -> int:
        return self.kappa.numerator

    @property
    def q(self) -> int:
        return self.kappa.denominator

    @property
    def normalizer(self) -> NormalizerSpec:
        return NormalizerSpec(self.p, self.q)

    def alpha_interval(self, bits: int | None = None) -> tuple[Fraction, Fraction]:
        lo, hi = self.delta.enclosure(bits or self.bits)
        return 1 / hi, 1 / lo

    def replace(self, **kw) -> "BoundParams":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        if "A" in kw or "K" in kw:
            mj = d["majorant"]
            if mj is not None:
                mj = MajorantSeries(mj.p_alpha, mj.delta, mj.T, d["K"], d["A"], mj.bits, mj.M, mj.N2)
            d["majorant"] = mj
        return BoundParams(**d)


def _abs_upper(x) -> Fraction:
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return abs(x.re)
        with precision(96):
            return upper(x.abs_arb())
    return abs(to_fraction(x))


def _parse_init(init):
    out = []
    for x in init:
        if isinstance(x, GaussianRational):
            out.append(x if x.im else x.re)
        else:
            out.append(to_fraction(x))
    return out


class _NormalizedPrefix:
    """Upper bounds on ``psi_n |u_n|`` from exact (or bounded) unrolling."""

    def __init__(self, R, init, normalizer, bounds_mode, bits):
        self.R, self.init, self.norm = R, init, normalizer
        self.bounds_mode, self.bits = bounds_mode, bits
        self._vals: list[Fraction] = []

    def _ball_bounds(self, n: int):
        """Cheap upper bounds via ball unrolling; ``None`` if precision runs out."""
        parts = [[to_fraction(x.re if isinstance(x, GaussianRational) else x) for x in self.init]]
        if any(isinstance(x, GaussianRational) and x.im for x in self.init):
            parts.append([to_fraction(x.im) if isinstance(x, GaussianRational) else Fraction(0)
                          for x in self.init])
        with precision(self.bits + 64):
            seqs = [unroll_balls(self.R, p, n) for p in parts]
            if any(q is None for q in seqs):
                return None
            out = []
            for vs in zip(*seqs):
                if all(v == 0 for v in vs):
                    out.append(Fraction(0))
                else:
                    out.append(upper(sum((v * v for v in vs), arb(0)).sqrt()))
            return out

    def __call__(self, n: int) -> list[Fraction]:
        if len(self._vals) < n:
            if self.bounds_mode:
                raw = unroll_bounds(self.R, [abs(to_fraction(x)) for x in self.init], n)
            else:
                raw = self._ball_bounds(n) or [_abs_upper(x) for x in unroll(self.R, self.init, n)]
            out = []
            with precision(self.bits + 32):
                for k, x in enumerate(raw):
                    if x == 0:
                        out.append(Fraction(0))
                    elif self.norm.trivial:
                        out.append(x)
                    else:
                        out.append(upper(ball(x) * self.norm.psi(k)))
            self._vals = out
        return self._vals[:n]


def bound_rec(R: RecOperator, init: Sequence, *, initial_are_bounds: bool = False,
              allow_nonreversible: bool = False, bits: int = 64,
              k_policy: str = "tight", refine_limit: int = REFINE_LIMIT) -> BoundParams:
    """Certified bound parameters for the solution of ``R u = 0`` with the given initial values.

    With ``initial_are_bounds`` the entries of ``init`` are upper bounds on
    ``|u_0|, ..., |u_{s-1}|`` and the result holds for every such solution.
    """
    s = R.order
    if len(init) != s:
        raise DomainError(f"expected {s} initial values, got {len(init)}")
    init = _parse_init(init)
    shape = check_shape(R)
    if not shape.nonsingular:
        raise PreconditionError(
            f"singular recurrence: leading coefficient vanishes at n = {shape.singular_roots[0]}")
    m = shape.valuation
    prefix = tuple(_abs_upper(x) for x in init[:m])
    Rs = shift_valuation(R)
    init_s = init[m:]
    rshape = check_shape(Rs)
    if not rshape.reversible and not allow_nonreversible:
        raise PreconditionError(
            "non-reversible recurrence: trailing coefficient vanishes at n = "
            f"{rshape.nonreversible_roots[0]}")
    if Rs.order == 0:
        raise DomainError("no growth data: the operator has a single term")
    g = asympt(Rs)
    if g.delta.infinite:
        raise PreconditionError("P_alpha has no nonzero root")
    D = normalized_diffeq(Rs, g.kappa, None, check_reversible=False)
    if compare_polys(D[D.order], g.p_alpha) is Cmp.LT:
        raise PreconditionError(
            "the normalized equation has singularities inside the expected disk")
    source = _NormalizedPrefix(Rs, init_s, g.normalizer, initial_are_bounds, bits)
    v = bound_normal_diffeq(D, g.p_alpha, source, bits=bits, k_policy=k_policy,
                             refine_limit=refine_limit)
    return BoundParams(g.kappa, g.p_alpha, g.delta, v.T, v.K, v.A, m, prefix, v, bits, R, D)


# ---------------------------------------------------------------------------
# Evaluations

def _vtilde_upper_ball(b: BoundParams, n: int) -> arb:
    """Ball whose upper end bounds ``v~_n`` (uses the upper end of alpha)."""
    _, ahi = b.alpha_interval()
    return b.A_ball * ball(ahi) ** n * unit_coefficient(b.T, b.K, n)


def evaluate_bound(b: BoundParams, n: int, bits: int | None = None) -> Fraction:
    """Certified upper bound on ``|u_n|``."""
    if n < 0:
        raise DomainError("negative index")
    if n < b.shift:
        return b.prefix[n]
    if b.A == 0:
        return Fraction(0)
    k = n - b.shift
    with precision((bits or b.bits) + 32):
        val = b.normalizer.psi_inv(k) * _vtilde_upper_ball(b, k)
        return upper(val)


def evaluate_bound_ball(b: BoundParams, n: int) -> arb:
    if n < b.shift:
        return ball(b.prefix[n])
    k = n - b.shift
    return b.normalizer.psi_inv(k) * _vtilde_upper_ball(b, k)


def _saddle_factor(T: int, K: int, n: int) -> arb:
    """``v~(r_n)/(A alpha^n r_n^n)``: the saddle-point factor for ``alpha = 1``."""
    x = arb(K) / (n + K + 1)
    if T == 0:
        return (1 / x) ** K * (1 - x) ** (-n) if n else (1 / x) ** K
    root = (x.log() / (T + 1)).exp()
    s = (arb(K) / T * ((-x.log()) * T / (T + 1)).exp()).exp()
    return (1 - root) ** (-n) * s if n else s


def saddle_point_coefficient_bound(b: BoundParams | MajorantSeries, n: int) -> Fraction:
    """Upper bound ``v~(r_n)/r_n^n`` on ``v~_n`` with ``r_n = (1 - (K/(n+K+1))^(1/(T+1)))/alpha``."""
    if b.A == 0:
        return Fraction(0)
    _, ahi = b.alpha_interval()
    with precision(b.bits + 32):
        return upper(b.A_ball * ball(ahi) ** n * _saddle_factor(b.T, b.K, n))


def saddle_point_bound(b: BoundParams, n: int) -> Fraction:
    """``psi_n^-1`` times the saddle-point bound: a bound on ``|u_n|``."""
    if n < b.shift:
        return b.prefix[n]
    if b.A == 0:
        return Fraction(0)
    k = n - b.shift
    _, ahi = b.alpha_interval()
    with precision(b.bits + 32):
        return upper(b.normalizer.psi_inv(k) * b.A_ball * ball(ahi) ** k
                     * _saddle_factor(b.T, b.K, k))


# ---------------------------------------------------------------------------
# Symbolic form

@dataclass(frozen=True)
class SymbolicBound:
    """``|u_n| <= A' * n!^kappa * alpha^n * phi(n)`` for ``n >= shift`` (index ``n - shift``).

    ``phi`` is the product of a polynomial factor coming from the comparison
    between ``1/psi_n`` and ``n!^kappa`` and of the saddle-point factor (or
    the binomial ``C(n+K-1, K-1)`` when ``form == "binomial"`` and ``T = 0``).
    """

    A: Fraction
    kappa: Fraction
    p_alpha: Poly
    delta: AlgebraicModulus
    T: int
    K: int
    form: str
    gamma_const: Fraction  # upper bound on the constant of the Gamma comparison
    shift: int
    prefix: tuple
    bits: int

    def alpha_interval(self):
        lo, hi = self.delta.enclosure(self.bits)
        return 1 / hi, 1 / lo

    def phi_ball(self, n: int) -> arb:
        return _poly_factor(self.kappa, n) * _phi_main(self.form, self.T, self.K, n)

    def evaluate(self, n: int) -> Fraction:
        if n < self.shift:
            return self.prefix[n]
        if self.A == 0:
            return Fraction(0)
        k = n - self.shift
        _, ahi = self.alpha_interval()
        with precision(self.bits + 32):
            val = ball(self.A) * _fact_pow(self.kappa, k) * ball(ahi) ** k * self.phi_ball(k)
            return upper(val)

    # -- rendering --
    def constants(self):
        return {"A": decimal_up(self.A, 2)}

    def text(self) -> str:
        return _render(self, latex=False)

    def latex(self) -> str:
        return _render(self, latex=True)


def _fact_pow(kappa: Fraction, n: int) -> arb:
    if kappa == 0:
        return arb(1)
    f = arb.fac_ui(n)
    if kappa.denominator == 1:
        return f ** kappa.numerator
    return (f.log() * kappa.numerator / kappa.denominator).exp()


def _poly_factor(kappa: Fraction, n: int) -> arb:
    p, q = kappa.numerator, kappa.denominator
    if p == 0:
        return arb(1)
    if p > 0:
        return (arb(n) / q + 1) ** p
    if n == 0:
        return arb(1)
    return (arb(n).log() * (-p) / q).exp()


def _phi_main(form: str, T: int, K: int, n: int) -> arb:
    if form == "binomial":
        return arb(math.comb(n + K - 1, K - 1))
    return _saddle_factor(T, K, n)


def _gamma_constant(kappa: Fraction) -> arb:
    """``((2 pi)^((q-1)/2) / sqrt q)^(p/q)`` for ``p > 0``; 1 otherwise."""
    p, q = kappa.numerator, kappa.denominator
    if p <= 0 or q == 1:
        return arb(1)
    c = (arb.pi() * 2).log() * (q - 1) / 2 - arb(q).log() / 2
    return (c * p / q).exp()


def symbolic_bound(b: BoundParams, form: str = "saddle") -> SymbolicBound:
    """Explicit formula dominating :func:`saddle_point_bound` (and hence the certificate)."""
    if form not in ("saddle", "binomial"):
        raise DomainError(f"unknown form {form!r}")
    if form == "binomial" and b.T != 0:
        raise DomainError("the binomial form requires T = 0")
    q = b.q
    n0 = math.ceil(Fraction(3 * q, 2))
    with precision(b.bits + 32):
        gc = upper(_gamma_constant(b.kappa))
        A1 = b.A_ball * ball(gc)
        best = A1
        if b.A != 0:
            for k in range(n0):
                # ratio psi_k^-1 * A * S(k) / (k!^kappa * poly(k) * phi(k)): alpha cancels
                num = b.normalizer.psi_inv(k) * b.A_ball * (
                    _saddle_factor(b.T, b.K, k) if form == "saddle" else unit_coefficient(b.T, b.K, k))
                den = _fact_pow(b.kappa, k) * _poly_factor(b.kappa, k) * _phi_main(form, b.T, b.K, k)
                best = best.max(num / den)
        A = round_up(upper(best), 64)
    return SymbolicBound(A, b.kappa, b.p_alpha, b.delta, b.T, b.K, form, gc, b.shift,
                         b.prefix, b.bits)


def _render(sb: SymbolicBound, latex: bool) -> str:
    A = decimal_up(sb.A, 2)
    nn = "n" if sb.shift == 0 else f"(n-{sb.shift})"
    p, q = sb.kappa.numerator, sb.kappa.denominator
    parts = [A]
    if p:
        if latex:
            parts.append(f"{nn}!^{{{p}/{q}}}" if q != 1 else f"{nn}!^{{{p}}}")
        else:
            parts.append(f"{nn}!^({p}/{q})" if q != 1 else f"{nn}!^({p})" if p < 0 else f"{nn}!^{p}")
    d = sb.delta.exact_value()
    if d is not None:
        a = 1 / d
        al = str(a) if a.denominator == 1 else (f"\\left(\\frac{{{a.numerator}}}{{{a.denominator}}}\\right)" if latex else f"(1/{a.denominator})" if a.numerator == 1 else f"({a})")
    else:
        al = decimal_up(sb.alpha_interval()[1], 6)
    if al != "1":
        parts.append(f"{al}^{{{nn}}}" if latex else f"{al}^{nn}")
    if p > 0:
        base = f"({nn}/{q}+1)" if q != 1 else f"({nn}+1)"
        parts.append(base if p == 1 else f"{base}^{{{p}}}" if latex else f"{base}^{p}")
    elif p < 0:
        # the factor is 1 at n = 0
        e = Fraction(-p, q)
        m1 = f"\\max({nn},1)" if latex else f"max({nn},1)"
        if e == 1:
            parts.append(m1)
        else:
            parts.append(f"{m1}^{{{e}}}" if latex else f"{m1}^({e})")
    K, T = sb.K, sb.T
    if sb.form == "binomial":
        parts.append(f"\\binom{{{nn}+{K - 1}}}{{{K - 1}}}" if latex else f"C({nn}+{K - 1},{K - 1})")
    elif T == 0:
        if latex:
            parts.append(f"\\left(\\frac{{{nn}+{K + 1}}}{{{K}}}\\right)^{{{K}}}"
                         f"\\left(1-\\frac{{{K}}}{{{nn}+{K + 1}}}\\right)^{{-{nn}}}")
        else:
            parts.append(f"(({nn}+{K + 1})/{K})^{K}*(1-{K}/({nn}+{K + 1}))^(-{nn})")
    else:
        kt = str(K) if T == 1 else f"\\frac{{{K}}}{{{T}}}"
        if latex:
            parts.append(
                f"\\left(1-\\left(\\frac{{{K}}}{{{nn}+{K + 1}}}\\right)^{{1/{T + 1}}}\\right)^{{-{nn}}}"
                f"\\exp\\left({kt}\\left(\\frac{{{nn}+{K + 1}}}{{{K}}}\\right)^{{{T}/{T + 1}}}\\right)")
        else:
            parts.append(f"(1-({K}/({nn}+{K + 1}))^(1/{T + 1}))^(-{nn})"
                         f"*exp({Fraction(K, T)}*(({nn}+{K + 1})/{K})^({T}/{T + 1}))")
    sep = " \\cdot " if latex else " * "
    body = sep.join(parts)
    if sb.shift:
        cond = f"n \\geq {sb.shift}" if latex else f"n >= {sb.shift}"
        body += f",\\quad {cond}" if latex else f"  for {cond}"
    return body
