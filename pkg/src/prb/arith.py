"""Exact arithmetic: rationals, Gaussian rationals, polynomials, rational functions.

Polynomials wrap :class:`flint.fmpq_poly`; the public surface speaks
:class:`fractions.Fraction` so callers never handle FLINT scalars directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from flint import acb, arb, fmpq, fmpq_poly, fmpz

from .errors import DomainError

Number = int | Fraction


def to_fmpq(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, (int, fmpz)):
        return fmpq(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, fmpz):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


# ---------------------------------------------------------------------------
# Gaussian rationals

@dataclass(frozen=True)
class GaussianRational:
    """An element ``re + im*i`` of Q(i)."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(to_fraction(x), Fraction(0))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        o = GaussianRational.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        c = o.conjugate()
        return GaussianRational((self.re * c.re - self.im * c.im) / n,
                                (self.re * c.im + self.im * c.re) / n)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus."""
        return self.re * self.re + self.im * self.im

    def abs_arb(self) -> arb:
        return arb(to_fmpq(self.norm())).sqrt()

    def to_acb(self) -> acb:
        return acb(arb(to_fmpq(self.re)), arb(to_fmpq(self.im)))

    def __str__(self):
        if not self.im:
            return _frac_str(self.re)
        im = "i" if self.im == 1 else ("-i" if self.im == -1 else f"{_frac_str(self.im)}*i")
        if not self.re:
            return im
        sign = "" if im.startswith("-") else "+"
        return f"{_frac_str(self.re)}{sign}{im}"

    def __repr__(self):
        return f"GaussianRational({self})"


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Polynomials

class Poly:
    """Dense univariate polynomial over Q with a variable tag (``"n"`` or ``"z"``).

    Coefficients are listed from the constant term upwards.
    """

    __slots__ = ("_p", "var")

    def __init__(self, coeffs: Iterable | fmpq_poly = (), var: str = "z"):
        if isinstance(coeffs, fmpq_poly):
            self._p = coeffs
        else:
            self._p = fmpq_poly([to_fmpq(c) for c in coeffs])
        self.var = var

    @classmethod
    def gen(cls, var="z"):
        return cls([0, 1], var)

    @classmethod
    def const(cls, c, var="z"):
        return cls([c], var)

    @property
    def flint(self) -> fmpq_poly:
        return self._p

    def _wrap(self, p):
        return Poly(p, self.var)

    def _other(self, other):
        if isinstance(other, Poly):
            return other._p
        if isinstance(other, (int, Fraction, fmpq, fmpz)):
            return fmpq_poly([to_fmpq(other)])
        return NotImplemented

    # -- structure --
    def coeffs(self) -> list[Fraction]:
        return [to_fraction(c) for c in self._p.coeffs()]

    def __getitem__(self, i: int) -> Fraction:
        if i < 0:
            return Fraction(0)
        return to_fraction(self._p[i])

    def degree(self) -> int:
        return self._p.degree()

    def __len__(self):
        return self._p.length()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.degree() <= 0

    def lc(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return to_fraction(self._p[self.degree()])

    def valuation(self) -> int:
        if self.is_zero():
            raise DomainError("valuation of the zero polynomial")
        i = 0
        while self._p[i] == 0:
            i += 1
        return i

    # -- arithmetic --
    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self._p + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self._p - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self._p)

    def __neg__(self):
        return self._wrap(-self._p)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self._p * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, fmpq, fmpz)):
            return self._wrap(self._p / to_fmpq(other))
        return NotImplemented

    def __pow__(self, e: int):
        return self._wrap(self._p ** e)

    def __divmod__(self, other):
        q, r = divmod(self._p, self._other(other))
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other):
        return self._wrap(self._p // self._other(other))

    def __mod__(self, other):
        return self._wrap(self._p % self._other(other))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._p == other._p
        if isinstance(other, (int, Fraction)):
            return self._p == fmpq_poly([to_fmpq(other)])
        return NotImplemented

    def __hash__(self):
        return hash((self.var, tuple(self.coeffs())))

    # -- evaluation --
    def __call__(self, x):
        if isinstance(x, Poly):
            return self.compose(x)
        if isinstance(x, (int, Fraction, fmpq, fmpz)):
            return to_fraction(self._p(to_fmpq(x)))
        if isinstance(x, GaussianRational):
            acc = GaussianRational()
            for c in reversed(self.coeffs()):
                acc = acc * x + c
            return acc
        if isinstance(x, (arb, acb)):
            cs = self._p.coeffs()
            acc = x * 0
            for c in reversed(cs):
                acc = acc * x + arb(c)
            return acc
        raise TypeError(f"cannot evaluate a polynomial at {type(x).__name__}")

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly([], other.var)
        for c in reversed(self.coeffs()):
            acc = acc * other + c
        return acc

    def shift(self, c) -> "Poly":
        """Return ``p(x + c)``."""
        return self.compose(Poly([c, 1], self.var))

    def scale(self, c) -> "Poly":
        """Return ``p(c*x)``."""
        c = to_fraction(c)
        return Poly([a * c ** i for i, a in enumerate(self.coeffs())], self.var)

    def derivative(self) -> "Poly":
        return self._wrap(self._p.derivative())

    def reverse(self, degree: int | None = None) -> "Poly":
        """Reciprocal polynomial ``x^d p(1/x)``."""
        d = self.degree() if degree is None else degree
        cs = self.coeffs() + [Fraction(0)] * max(0, d + 1 - len(self))
        return Poly(list(reversed(cs[: d + 1])), self.var)

    def gcd(self, other: "Poly") -> "Poly":
        return self._wrap(self._p.gcd(other._p))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self / self.lc()

    def primitive(self) -> "Poly":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero():
            return self
        num = self._p.numer()
        cs = [int(c) for c in num.coeffs()]
        g = 0
        for c in cs:
            g = _gcd(g, c)
        if cs[-1] < 0:
            g = -g
        return Poly([Fraction(c, g) for c in cs], self.var)

    def normalized(self) -> "Poly":
        """Unit normalization: constant term 1 when nonzero, else monic."""
        if self.is_zero():
            return self
        c0 = self[0]
        return self / c0 if c0 != 0 else self.monic()

    def strip_valuation(self) -> "Poly":
        v = self.valuation()
        return Poly(self.coeffs()[v:], self.var) if v else self

    def with_var(self, var: str) -> "Poly":
        return Poly(self._p, var)

    def nonneg_integer_roots(self) -> list[int]:
        """Sorted nonnegative integer roots (the polynomial must be nonzero)."""
        if self.is_zero():
            raise DomainError("zero polynomial has every integer as a root")
        if self.is_constant():
            return []
        _, facs = self._p.factor()
        roots = []
        for f, _ in facs:
            if f.degree() == 1:
                r = -f[0] / f[1]
                if r.q == 1 and r.p >= 0:
                    roots.append(int(r.p))
        return sorted(roots)

    # -- display --
    def __str__(self):
        return poly_to_str(self.coeffs(), self.var)

    def __repr__(self):
        return f"Poly({self}, var={self.var!r})"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def poly_to_str(coeffs: Sequence[Fraction], var: str) -> str:
    """Render in the grammar accepted by :mod:`prb.parse`, lowest degree first."""
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            term = _frac_str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            term = mono if mag == 1 else f"{_frac_str(mag)}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, term))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        out += sign + term
    return out


# ---------------------------------------------------------------------------
# Rational functions

class RatFun:
    """``num/den`` in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly([1], num.var)
        if den.is_zero():
            raise DomainError("rational function with zero denominator")
        g = num.gcd(den)
        if not g.is_constant():
            num, den = num // g, den // g
        lc = den.lc()
        self.num = num / lc
        self.den = den / lc

    @property
    def var(self):
        return self.num.var

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __add__(self, other):
        o = _ratfun(other, self.var)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_ratfun(other, self.var))

    def __rsub__(self, other):
        return _ratfun(other, self.var) - self

    def __mul__(self, other):
        o = _ratfun(other, self.var)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _ratfun(other, self.var)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __eq__(self, other):
        o = _ratfun(other, self.var)
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return self.num.is_zero()

    def split(self) -> tuple[Poly, "RatFun"]:
        """Polynomial part and proper part."""
        q, r = divmod(self.num, self.den)
        return q, RatFun(r, self.den)

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFun({self})"


def _ratfun(x, var):
    if isinstance(x, RatFun):
        return x
    if isinstance(x, Poly):
        return RatFun(x)
    return RatFun(Poly([x], var))


def series_coefficients(r: RatFun, N: int) -> list[Fraction]:
    """Exact Taylor coefficients ``r_0, ..., r_{N-1}`` at the origin."""
    den = r.den.coeffs()
    if den[0] == 0:
        raise DomainError("rational function has a pole at 0")
    num = r.num.coeffs()
    # integer arithmetic: scale so that den has integer coefficients
    L = 1
    for c in den:
        L = L * c.denominator // _gcd(L, c.denominator)
    d = [int(c * L) for c in den]
    num = [c * L for c in num]
    d0 = d[0]
    out: list[Fraction] = []
    for n in range(N):
        acc = num[n] if n < len(num) else Fraction(0)
        for k in range(1, min(n, len(d) - 1) + 1):
            if d[k]:
                acc -= d[k] * out[n - k]
        out.append(acc / d0)
    return out


# ---------------------------------------------------------------------------
# Squarefree factorization and partial fractions

@dataclass(frozen=True)
class SquarefreeFactorization:
    """``unit * prod D_i^i`` with pairwise coprime squarefree ``D_i``."""

    unit: Fraction
    factors: tuple  # of (Poly, multiplicity)

    def expand(self) -> Poly:
        var = self.factors[0][0].var if self.factors else "z"
        acc = Poly([self.unit], var)
        for f, i in self.factors:
            acc = acc * f ** i
        return acc

    def squarefree_part(self) -> Poly:
        var = self.factors[0][0].var if self.factors else "z"
        acc = Poly([1], var)
        for f, _ in self.factors:
            acc = acc * f
        return acc

    def __iter__(self):
        return iter(self.factors)


def squarefree_factorize(P: Poly) -> SquarefreeFactorization:
    if P.is_zero():
        raise DomainError("squarefree factorization of the zero polynomial")
    _, facs = P.flint.factor_squarefree()
    out = []
    for f, i in facs:
        out.append((Poly(f, P.var).normalized(), int(i)))
    out.sort(key=lambda t: t[1])
    prod = Poly([1], P.var)
    for f, i in out:
        prod = prod * f ** i
    unit = P.lc() / prod.lc()
    return SquarefreeFactorization(unit, tuple(out))


def squarefree_part(P: Poly) -> Poly:
    return squarefree_factorize(P).squarefree_part()


@dataclass(frozen=True)
class PartialFractionData:
    """Decomposition ``B/D = A + sum_{i,d} sum_{D_i(zeta)=0} h_{i,d}(zeta)/(zeta - z)^d``.

    ``h`` maps ``(i, d)`` to a polynomial in zeta reduced modulo ``D_i``,
    where ``D_i`` is the factor of multiplicity ``i``.
    """

    poly_part: Poly
    factors: tuple  # of (D_i, i)
    h: dict

    def factor(self, i: int) -> Poly:
        for f, j in self.factors:
            if j == i:
                return f
        raise KeyError(i)

    def coefficient(self, n: int) -> Fraction:
        """Exact ``[z^n]`` of the reconstructed function, via power-sum traces."""
        total = self.poly_part[n]
        for f, i in self.factors:
            for d in range(1, i + 1):
                h = self.h[(i, d)]
                if h.is_zero():
                    continue
                # 1/(zeta - z)^d = zeta^{-d} (1 - z/zeta)^{-d}
                e = -d - n
                total += comb(n + d - 1, d - 1) * _trace(h, f, e)
        return total


def _mod_inverse(a: Poly, m: Poly) -> Poly:
    g, s, _ = a.flint.xgcd(m.flint)
    if g.degree() != 0:
        raise DomainError("element is not invertible modulo the factor")
    return Poly(s / g[0], a.var) % m


def _mod_pow(a: Poly, e: int, m: Poly) -> Poly:
    if e < 0:
        a = _mod_inverse(a, m)
        e = -e
    result = Poly([1], a.var) % m
    base = a % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def _trace(h: Poly, f: Poly, e: int) -> Fraction:
    """``sum over roots zeta of f of h(zeta) * zeta^e``."""
    g = (h * _mod_pow(Poly.gen(f.var), e, f)) % f
    sums = power_sums(f, max(g.degree(), 0))
    return sum((c * sums[k] for k, c in enumerate(g.coeffs())), Fraction(0))


def power_sums(f: Poly, K: int) -> list[Fraction]:
    """Power sums ``p_0, ..., p_K`` of the roots of ``f`` (Newton's identities)."""
    d = f.degree()
    c = f.monic().coeffs()
    e = [Fraction(1)] + [(-1) ** k * c[d - k] for k in range(1, d + 1)]
    p = [Fraction(d)]
    for k in range(1, K + 1):
        s = Fraction(0)
        for i in range(1, min(k - 1, d) + 1):
            s += (-1) ** (i - 1) * e[i] * p[k - i]
        if k <= d:
            s += (-1) ** (k - 1) * k * e[k]
        p.append(s)
    return p


def partial_fractions(B: Poly, F: SquarefreeFactorization) -> PartialFractionData:
    """Partial fractions of ``B / prod D_i^i`` over the roots of each ``D_i``."""
    D = F.expand()
    if B.degree() >= D.degree():
        raise DomainError("improper fraction: split off the polynomial part first")
    if D[0] == 0:
        raise DomainError("denominator vanishes at 0")
    z = B.var
    h = {}
    for Di, i in F.factors:
        # E_i: cofactor of D_i^i
        E = Poly([F.unit], z)
        for Dj, j in F.factors:
            if Dj is not Di:
                E = E * Dj ** j
        # Work in K = Q[zeta]/(D_i); expand around z = zeta + t up to t^i.
        # Each series is a list of Polys in zeta (coefficients of t^k).
        def taylor(P: Poly, order: int):
            out = []
            cur = P
            fact = 1
            for k in range(order):
                if k:
                    fact *= k
                out.append((cur / fact) % Di)
                cur = cur.derivative()
            return out

        Bs = taylor(B, i)
        Es = taylor(E, i)
        # D_i(zeta + t)/t: coefficient of t^k is D_i^{(k+1)}(zeta)/(k+1)!
        Ds = taylor(Di, i + 1)[1:]
        Ds_pow = _series_pow(Ds, i, Di)
        denom = _series_mul(Es, Ds_pow, Di, i)
        G = _series_mul(Bs, _series_inv(denom, Di, i), Di, i)
        # B/D near zeta: G(t)/t^i = sum_k G_k t^{k-i}; the term t^{-d} has
        # coefficient G_{i-d}, and t^{-d} = (-1)^d/(zeta - z)^d.
        for d in range(1, i + 1):
            coeff = G[i - d]
            h[(i, d)] = coeff if d % 2 == 0 else -coeff
    return PartialFractionData(Poly([], z), tuple(F.factors), h)


def _series_mul(a, b, m, order):
    out = []
    for k in range(order):
        acc = Poly([], m.var)
        for j in range(k + 1):
            if j < len(a) and k - j < len(b):
                acc = acc + a[j] * b[k - j]
        out.append(acc % m)
    return out


def _series_pow(a, e, m):
    order = len(a)
    result = [Poly([1], m.var)] + [Poly([], m.var)] * (order - 1)
    for _ in range(e):
        result = _series_mul(result, a, m, order)
    return result


def _series_inv(a, m, order):
    inv0 = _mod_inverse(a[0], m)
    out = [inv0]
    for k in range(1, order):
        acc = Poly([], m.var)
        for j in range(1, k + 1):
            if j < len(a):
                acc = acc + a[j] * out[k - j]
        out.append((-acc * inv0) % m)
    return out


def decompose(r: RatFun) -> PartialFractionData:
    """Full decomposition of ``r`` including its polynomial part."""
    A, proper = r.split()
    F = squarefree_factorize(proper.den)
    pf = partial_fractions(proper.num, F)
    return PartialFractionData(A, pf.factors, pf.h)


def binomial(n: int, k: int) -> int:
    if k < 0 or n < k:
        return 0
    return comb(n, k)
