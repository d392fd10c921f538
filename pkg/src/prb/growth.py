"""Growth data of a recurrence and the associated Euler-derivative equations.

``asympt`` reads the factorial exponent ``kappa`` and the polynomial
``P_alpha`` off the Newton polygon.  ``rec_to_diffeq`` turns a recurrence
into an equation in ``theta`` for the generating series, and
``normalized_diffeq`` first multiplies the sequence by ``psi_n`` so that the
series has a finite nonzero radius of convergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from flint import arb, fmpq

from .arith import Poly, to_fraction
from .balls import ball
from .errors import DomainError, InternalError, PreconditionError
from .modulus import AlgebraicModulus, Cmp, compare_polys, dominant_modulus
from .operators import DiffOperatorTheta, RecOperator, symmetric_product


@dataclass(frozen=True)
class NormalizerSpec:
    """``psi_n = q^(-p n/q) Gamma(n/q + 1)^(-p)``, so that ``(n+q)^p psi_{n+q} = psi_n``."""

    p: int
    q: int

    @property
    def trivial(self) -> bool:
        return self.p == 0

    def psi(self, n: int) -> arb:
        return _psi_inv(self.p, self.q, n) ** -1 if self.p else arb(1)

    def psi_inv(self, n: int) -> arb:
        """Ball containing ``1/psi_n = q^(p n/q) Gamma(n/q+1)^p``."""
        return _psi_inv(self.p, self.q, n)

    def operator(self) -> RecOperator:
        """First-order-in-``S^q`` operator annihilating ``psi``."""
        n = Poly.gen("n")
        p, q = self.p, self.q
        coeffs = [Poly([], "n")] * (q + 1)
        if p >= 0:
            coeffs[0] = Poly([-1], "n")
            coeffs[q] = (n + q) ** p
        else:
            coeffs[0] = -((n + q) ** (-p))
            coeffs[q] = Poly([1], "n")
        return RecOperator(coeffs)


def _psi_inv(p: int, q: int, n: int) -> arb:
    if p == 0:
        return arb(1)
    if q == 1:
        return arb.fac_ui(n) ** p
    g = arb.gamma_fmpq(fmpq(n + q, q))
    scale = (arb(q).log() * (p * n) / q).exp()
    return scale * g ** p


@dataclass(frozen=True)
class GrowthData:
    kappa: Fraction
    p_alpha: Poly
    delta: AlgebraicModulus  # delta(P_alpha); alpha = 1/delta

    @property
    def p(self) -> int:
        return self.kappa.numerator

    @property
    def q(self) -> int:
        return self.kappa.denominator

    @property
    def normalizer(self) -> NormalizerSpec:
        return NormalizerSpec(self.p, self.q)

    def alpha_exact(self) -> Fraction | None:
        """``alpha`` as a rational number when it is one."""
        d = self.delta.exact_value()
        return None if d is None else 1 / d

    def alpha_ball(self, bits: int = 64) -> arb:
        return self.delta.reciprocal_ball(bits)


def asympt(R: RecOperator) -> GrowthData:
    s = R.order
    bs = R[s]
    d = bs.degree()
    cands = [Fraction(R[k].degree() - d, s - k) for k in range(s) if not R[k].is_zero()]
    if not cands:
        raise DomainError("no growth data: the operator has a single term")
    kappa = max(cands)
    coeffs = []
    for l in range(s + 1):
        idx = d + l * kappa
        if idx.denominator == 1 and idx >= 0:
            coeffs.append(R[s - l][int(idx)])
        else:
            coeffs.append(Fraction(0))
    P = Poly(coeffs, "z")
    return GrowthData(kappa, P, dominant_modulus(P))


def rec_to_diffeq(R: RecOperator) -> DiffOperatorTheta:
    """Equation in ``theta`` for ``sum u_n z^n`` when ``R u = 0`` for every ``n >= 0``.

    The operator ``g(n) R`` is rewritten with ``n`` replaced by ``theta``
    after multiplying by ``z^s``; ``g`` kills the boundary terms that involve
    the initial values.
    """
    s = R.order
    n = Poly.gen("n")
    g = Poly([1], "n")
    for i in range(1, s + 1):
        if any(R[k](-i) != 0 for k in range(i, s + 1)):
            g = g * (n + i)
    rows = []
    for k in range(s + 1):
        c = (g * R[k]).shift(-k)  # polynomial in m = n + k
        rows.append(c.coeffs())
    r = max((len(c) for c in rows), default=1) - 1
    a = []
    for j in range(r + 1):
        cs = [Fraction(0)] * (s + 1)
        for k in range(s + 1):
            if j < len(rows[k]):
                cs[s - k] = rows[k][j]
        a.append(Poly(cs, "z"))
    return DiffOperatorTheta(a)


@lru_cache(maxsize=256)
def normalized_recurrence(R: RecOperator, kappa: Fraction) -> RecOperator:
    """Operator annihilating ``psi_n u_n``."""
    if kappa == 0:
        return R
    return symmetric_product(R, NormalizerSpec(kappa.numerator, kappa.denominator).operator())


def normalized_diffeq(R: RecOperator, kappa: Fraction, p_alpha: Poly | None = None,
                      check_reversible: bool = True) -> DiffOperatorTheta:
    """Equation for ``sum psi_n u_n z^n``; 0 is a regular point of the result."""
    from .operators import check_shape
    shape = check_shape(R)
    if not shape.nonsingular:
        raise PreconditionError(
            f"singular recurrence: leading coefficient vanishes at n = {shape.singular_roots[0]}")
    if R[0].is_zero():
        raise PreconditionError("the constant coefficient in S must be nonzero")
    if check_reversible and not shape.reversible:
        raise PreconditionError(
            f"non-reversible recurrence: trailing coefficient vanishes at n = {shape.nonreversible_roots[0]}")
    Rh = normalized_recurrence(R, Fraction(kappa))
    D = rec_to_diffeq(Rh)
    lead = D[D.order]
    if lead[0] == 0:
        raise InternalError("normalization failed: 0 is a singular point of the equation")
    if p_alpha is not None and compare_polys(lead, p_alpha) is Cmp.LT:
        raise InternalError("normalized equation has singularities inside the expected disk")
    return D
