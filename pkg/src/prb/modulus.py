"""Dominant root modulus engine.

For a polynomial ``P`` with at least one nonzero root, ``delta(P)`` is the
smallest modulus of a nonzero root and ``ord_delta(P)`` the largest
multiplicity among the roots of that modulus.  Monomials have
``delta = INFINITE``.

Enclosures come from Graeffe root squaring in ball arithmetic, with a fall
back to certified complex root isolation.  Comparisons are exact: when the
enclosures refuse to separate, equality is decided through the polynomial
whose roots are the products ``zeta_i * conj(zeta_j)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from flint import acb, arb, fmpq, fmpq_poly

from .arith import Poly, power_sums, squarefree_factorize, to_fraction
from .balls import MAX_PREC, ball, lower, precision, round_down, round_up, upper
from .errors import DomainError, PrecisionError


class Cmp(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


class Direction(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


LOWER = Direction.LOWER
UPPER = Direction.UPPER


def _key(P: Poly) -> tuple:
    return tuple(P.coeffs())


def _from_key(key: tuple) -> Poly:
    return Poly(list(key), "z")


def core_of(P: Poly) -> Poly | None:
    """Squarefree part with the zero root removed, normalized; ``None`` for monomials."""
    if P.is_zero():
        raise DomainError("dominant modulus of the zero polynomial")
    Q = P.with_var("z").strip_valuation()
    if Q.is_constant():
        return None
    F = squarefree_factorize(Q)
    return F.squarefree_part().normalized()


# ---------------------------------------------------------------------------
# Enclosures

def _graeffe_enclosure(cs: list[Fraction], bits: int, steps: int = 64):
    """Enclosure of the minimal root modulus by Graeffe iteration.

    Returns ``(lo, hi)`` as Fractions; either may be ``None`` when no
    information could be certified.
    """
    d = len(cs) - 1
    target = Fraction(1, 2 ** bits)
    best_lo, best_hi = None, None
    wp = 2 * bits + 64
    with precision(wp):
        a = [ball(c) for c in cs]
        for k in range(steps + 1):
            a0 = a[0]
            if not all(x.is_finite() for x in a):
                break
            lo_b = None
            hi_b = None
            for j in range(1, d + 1):
                aj = a[j]
                if aj.is_zero():
                    continue
                # lower bound: |a0/aj|^{1/j} / 2 using an upper bound on |aj|
                amax = arb(aj.abs_upper())
                amin = aj.abs_lower()
                cand_lo = (arb(a0.abs_lower()) / amax)
                if cand_lo > 0:
                    cand_lo = (cand_lo.log() / j).exp() / 2
                    cand_lo = arb(cand_lo.lower())
                    lo_b = cand_lo if lo_b is None else arb(lo_b.min(cand_lo).lower())
                else:
                    lo_b = arb(0)
                if amin > 0:
                    cand_hi = comb(d, j) * arb(a0.abs_upper()) / arb(amin)
                    cand_hi = arb(((cand_hi.log() / j).exp()).upper())
                    hi_b = cand_hi if hi_b is None else arb(hi_b.min(cand_hi).upper())
            if lo_b is not None:
                lo_b = _root_pow2(lo_b, k, down=True)
            if hi_b is not None:
                hi_b = _root_pow2(hi_b, k, down=False)
            if lo_b is not None and lo_b.is_finite() and lo_b >= 0:
                cand = lower(lo_b)
                if best_lo is None or cand > best_lo:
                    best_lo = cand
            if hi_b is not None and hi_b.is_finite():
                cand = upper(hi_b)
                if best_hi is None or cand < best_hi:
                    best_hi = cand
            if best_lo is not None and best_hi is not None and best_hi - best_lo <= target:
                break
            if k == steps:
                break
            # root squaring: Q(w) = E(w)^2 - w O(w)^2
            E = a[0::2]
            O = a[1::2]
            new = [arb(0)] * (d + 1)
            for i, x in enumerate(E):
                for j, y in enumerate(E):
                    if i + j <= d:
                        new[i + j] += x * y
            for i, x in enumerate(O):
                for j, y in enumerate(O):
                    if i + j + 1 <= d:
                        new[i + j + 1] -= x * y
            if new[0].contains(0):
                break
            a = [x / new[0] for x in new]
    return best_lo, best_hi


def _root_pow2(x: arb, k: int, down: bool) -> arb:
    """Rigorous ``x^(1/2^k)`` rounded in the requested direction."""
    for _ in range(k):
        x = x.sqrt()
        x = arb(x.lower()) if down else arb(x.upper())
    return x


def _roots_enclosure(cs: list[Fraction], bits: int):
    P = fmpq_poly([fmpq(c.numerator, c.denominator) for c in cs])
    num = P.numer()
    with precision(bits + 32):
        roots = num.complex_roots()
        los, his = [], []
        for r, _ in roots:
            m = abs(r)
            los.append(lower(m))
            his.append(upper(m))
    return min(los), min(his)


@lru_cache(maxsize=4096)
def _enclosure(key: tuple, bits: int) -> tuple[Fraction, Fraction]:
    cs = list(key)
    d = len(cs) - 1
    if d == 1:
        r = abs(cs[0] / cs[1])
        return r, r
    target = Fraction(1, 2 ** bits)
    lo, hi = _graeffe_enclosure(cs, bits)
    if lo is None or hi is None or hi - lo > target:
        prec = bits
        while True:
            rlo, rhi = _roots_enclosure(cs, prec)
            lo = rlo if lo is None else max(lo, rlo)
            hi = rhi if hi is None else min(hi, rhi)
            if hi - lo <= target or prec > 8 * MAX_PREC:
                break
            prec *= 2
    if lo is None or hi is None or lo > hi:
        raise PrecisionError("could not enclose the dominant root modulus")
    return lo, hi


# ---------------------------------------------------------------------------
# The value type

@dataclass(frozen=True)
class AlgebraicModulus:
    """``delta(defining_poly)`` with its multiplicity ``ord`` and a cached enclosure."""

    defining_poly: Poly
    core: Poly | None
    ord: int
    lo: Fraction = field(default=Fraction(0))
    hi: Fraction = field(default=Fraction(0))
    bits: int = 0

    @property
    def infinite(self) -> bool:
        return self.core is None

    def enclosure(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        if self.infinite:
            raise DomainError("enclosure of an infinite modulus")
        if bits <= self.bits:
            return self.lo, self.hi
        lo, hi = _enclosure(_key(self.core), bits)
        if self.bits:
            lo, hi = max(lo, self.lo), min(hi, self.hi)
        return lo, hi

    def refined(self, bits: int) -> "AlgebraicModulus":
        if self.infinite or bits <= self.bits:
            return self
        lo, hi = self.enclosure(bits)
        return AlgebraicModulus(self.defining_poly, self.core, self.ord, lo, hi, bits)

    def exact_value(self) -> Fraction | None:
        """``delta`` as a rational number when it is one, else None."""
        if self.infinite:
            return None
        lo, hi = self.enclosure(160)
        c = ((lo + hi) / 2).limit_denominator(2 ** 64)
        if not lo <= c <= hi or c == 0:
            return None
        lin = Poly([c, Fraction(-1)], "z").normalized()
        return c if _cmp_cores(_key(self.core), _key(lin)) is Cmp.EQ else None

    def ball(self, bits: int = 64) -> arb:
        lo, hi = self.enclosure(bits)
        return _interval_ball(lo, hi)

    def reciprocal_ball(self, bits: int = 64) -> arb:
        """Ball containing ``1/delta``."""
        lo, hi = self.enclosure(bits)
        if lo <= 0:
            raise DomainError("modulus enclosure touches 0")
        return _interval_ball(1 / hi, 1 / lo)

    def __str__(self):
        if self.infinite:
            return "INFINITE"
        lo, hi = self.enclosure(64)
        return f"delta({self.defining_poly}) in [{float(lo):.17g}, {float(hi):.17g}] (ord {self.ord})"


def _interval_ball(lo: Fraction, hi: Fraction) -> arb:
    a = ball(lo)
    b = ball(hi)
    return arb(a.lower()).union(arb(b.upper()))


INFINITE = AlgebraicModulus(Poly([1], "z"), None, 0)


def modulus_of_core(core: Poly | None, defining: Poly | None = None, ord: int = 1) -> AlgebraicModulus:
    if core is None:
        return AlgebraicModulus(defining if defining is not None else Poly([1], "z"), None, 0)
    d = defining if defining is not None else core
    lo, hi = _enclosure(_key(core), 64)
    return AlgebraicModulus(d, core, ord, lo, hi, 64)


def dominant_modulus(P: Poly) -> AlgebraicModulus:
    """``delta(P)`` and ``ord_delta(P)``; monomials give ``INFINITE``."""
    if P.is_zero():
        raise DomainError("dominant modulus of the zero polynomial")
    Q = P.with_var("z").strip_valuation()
    if Q.is_constant():
        return AlgebraicModulus(P, None, 0)
    F = squarefree_factorize(Q)
    core = F.squarefree_part().normalized()
    ranked = []
    for D, i in F.factors:
        ranked.append((D.normalized(), i))
    # factors whose delta equals delta(P)
    best = []
    for D, i in ranked:
        c = _cmp_cores(_key(D), _key(core))
        if c is Cmp.EQ:
            best.append(i)
    if not best:
        raise PrecisionError("no factor attains the dominant modulus")
    return modulus_of_core(core, P, max(best))


def compare_moduli(a: AlgebraicModulus, b: AlgebraicModulus) -> Cmp:
    """Exact comparison of two dominant root moduli."""
    if a.infinite or b.infinite:
        if a.infinite and b.infinite:
            return Cmp.EQ
        return Cmp.GT if a.infinite else Cmp.LT
    return _cmp_cores(_key(a.core), _key(b.core))


def compare_polys(P: Poly, Q: Poly) -> Cmp:
    """Compare ``delta(P)`` with ``delta(Q)``."""
    cp, cq = core_of(P), core_of(Q)
    if cp is None or cq is None:
        if cp is None and cq is None:
            return Cmp.EQ
        return Cmp.GT if cp is None else Cmp.LT
    return _cmp_cores(_key(cp), _key(cq))


def _separate(kp, kq, bits) -> Cmp | None:
    lp, hp = _enclosure(kp, bits)
    lq, hq = _enclosure(kq, bits)
    if hp < lq:
        return Cmp.LT
    if hq < lp:
        return Cmp.GT
    return None


@lru_cache(maxsize=4096)
def _cmp_cores(kp: tuple, kq: tuple) -> Cmp:
    if kp == kq:
        return Cmp.EQ
    for bits in (32, 64, 128):
        c = _separate(kp, kq, bits)
        if c is not None:
            return c
    P, Q = _from_key(kp), _from_key(kq)
    g = P.gcd(Q)
    if not g.is_constant():
        g = g.normalized()
        P1 = (P // g)
        Q1 = (Q // g)
        kg = _key(g)

        def cmp_g(R: Poly) -> Cmp:
            if R.is_constant():
                return Cmp.LT
            return _cmp_cores(kg, _key(R.normalized()))

        c1, c2 = cmp_g(P1), cmp_g(Q1)
        p_is_g = c1 is not Cmp.GT
        q_is_g = c2 is not Cmp.GT
        if p_is_g and q_is_g:
            return Cmp.EQ
        if p_is_g:
            return Cmp.GT
        if q_is_g:
            return Cmp.LT
        return _cmp_cores(_key(P1.normalized()), _key(Q1.normalized()))
    return _cmp_coprime(kp, kq)


def _cmp_coprime(kp, kq) -> Cmp:
    GP = GQ = G = None
    bits = 256
    while bits <= 8 * MAX_PREC:
        c = _separate(kp, kq, bits)
        if c is not None:
            return c
        if GP is None:
            GP = _squarefree(_modulus_product_poly(_from_key(kp)))
            GQ = _squarefree(_modulus_product_poly(_from_key(kq)))
            G = GP.gcd(GQ)
        if G.degree() >= 1:
            lp, hp = _enclosure(kp, bits)
            lq, hq = _enclosure(kq, bits)
            a = min(lp, lq) ** 2
            b = max(hp, hq) ** 2
            if (_count_real_roots(GP, a, b) == 1 and _count_real_roots(GQ, a, b) == 1
                    and _count_real_roots(G, a, b) >= 1):
                return Cmp.EQ
        bits *= 2
    raise PrecisionError("could not decide the comparison of root moduli")


def _squarefree(p: fmpq_poly) -> fmpq_poly:
    g = p.gcd(p.derivative())
    return p / g if g.degree() > 0 else p


def _modulus_product_poly(P: Poly) -> fmpq_poly:
    """Polynomial whose roots are ``zeta_i * conj(zeta_j)`` over roots of ``P``."""
    d = P.degree()
    D = d * d
    p = power_sums(P, D)
    S = [Fraction(0)] + [p[k] * p[k] for k in range(1, D + 1)]
    e = [Fraction(1)]
    for k in range(1, D + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * S[i]
        e.append(acc / k)
    coeffs = [Fraction(0)] * (D + 1)
    for k in range(D + 1):
        coeffs[D - k] = (-1) ** k * e[k]
    return fmpq_poly([fmpq(c.numerator, c.denominator) for c in coeffs])


def _sign_changes(seq, x: fmpq) -> int:
    changes = 0
    last = 0
    for s in seq:
        v = s(x)
        sg = (v > 0) - (v < 0)
        if sg == 0:
            continue
        if last and sg != last:
            changes += 1
        last = sg
    return changes


@lru_cache(maxsize=256)
def _sturm(p_key: tuple) -> tuple:
    p = fmpq_poly([fmpq(c.numerator, c.denominator) for c in p_key])
    seq = [p, p.derivative()]
    while not seq[-1].is_zero() and seq[-1].degree() > 0:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(r)
    return tuple(seq)


def _count_real_roots(p: fmpq_poly, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of ``p`` in the closed interval ``[a, b]``."""
    key = tuple(to_fraction(c) for c in p.coeffs())
    seq = _sturm(key)
    fa = fmpq(a.numerator, a.denominator)
    fb = fmpq(b.numerator, b.denominator)
    n = _sign_changes(seq, fa) - _sign_changes(seq, fb)
    if p(fa) == 0:
        n += 1
    return n


# ---------------------------------------------------------------------------
# Approximations

def approx_modulus(a: AlgebraicModulus, direction: Direction, bits: int) -> Fraction:
    """Dyadic bound on ``delta`` from the requested side, accurate to about ``2^-bits``."""
    if bits < 1:
        raise DomainError("bits must be positive")
    if a.infinite:
        if direction is UPPER:
            raise DomainError("no finite upper bound for an infinite modulus")
        raise DomainError("infinite modulus has no finite lower approximation")
    lo, hi = a.enclosure(bits + 2)
    mant = bits + 8 + max(0, hi.numerator.bit_length() - hi.denominator.bit_length())
    if direction is LOWER:
        return round_down(lo, mant)
    return round_up(hi, mant)


def root_abs_sum_upper(h: Poly, Di: Poly, d: int, bits: int = 64) -> Fraction:
    """Certified upper bound on ``sum over roots zeta of D_i of |h(zeta) zeta^-d|``."""
    if Di[0] == 0:
        raise DomainError("D_i must not vanish at 0")
    if h.is_zero():
        return Fraction(0)
    num = Di.flint.numer()
    prec = max(bits, 32)
    while True:
        with precision(prec + 16):
            total = arb(0)
            for r, mult in num.complex_roots():
                hv = h(r)
                if d:
                    hv = hv / r ** d
                total += mult * arb(abs(hv).upper())
            if total.is_finite():
                return upper(total)
        prec *= 2
        if prec > 8 * MAX_PREC:
            raise PrecisionError("root enclosures did not converge")


def root_abs_sum_upper_coarse(h: Poly, Di: Poly, d: int, bits: int = 64) -> Fraction:
    """Cruder bound: each root satisfies ``delta(D_i) <= |zeta| <= 1/delta(rev D_i)``."""
    if h.is_zero():
        return Fraction(0)
    if Di[0] == 0:
        raise DomainError("D_i must not vanish at 0")
    rmin, _ = modulus_of_core(core_of(Di)).enclosure(bits)
    lo_rev, _ = modulus_of_core(core_of(Di.reverse())).enclosure(bits)
    rmax = 1 / lo_rev
    total = Fraction(0)
    for k, c in enumerate(h.coeffs()):
        if c == 0:
            continue
        e = k - d
        total += abs(c) * (rmax ** e if e >= 0 else (1 / rmin) ** (-e))
    return round_up(total * Di.degree(), 64)
