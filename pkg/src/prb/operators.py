"""Recurrence operators in Q[n]<S> and Euler-derivative operators in Q[z]<theta>."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import GaussianRational, Poly, RatFun, to_fraction
from .errors import DomainError, InternalError, PreconditionError


def _as_poly(c, var):
    if isinstance(c, Poly):
        return c.with_var(var)
    return Poly([c], var)


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return tuple(coeffs)


class RecOperator:
    """``sum_k b_k(n) S^k`` with coefficients on the left; ``S u_n = u_{n+1}``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        cs = _trim(_as_poly(c, "n") for c in coeffs)
        if not cs:
            raise DomainError("zero recurrence operator")
        self.coeffs = cs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        raise InternalError("unreachable")

    def __getitem__(self, k) -> Poly:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Poly([], "n")

    def __eq__(self, other):
        return isinstance(other, RecOperator) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "RecOperator") -> "RecOperator":
        m = max(len(self.coeffs), len(other.coeffs))
        return RecOperator([self[k] + other[k] for k in range(m)])

    def __mul__(self, other):
        if not isinstance(other, RecOperator):
            return RecOperator([c * other for c in self.coeffs])
        # (a S^i)(b S^j) = a(n) b(n+i) S^{i+j}
        out = [Poly([], "n")] * (self.order + other.order + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b.shift(i)
        return RecOperator(out)

    def left_mul_poly(self, p: Poly) -> "RecOperator":
        return RecOperator([p.with_var("n") * c for c in self.coeffs])

    def primitive(self) -> "RecOperator":
        """Scale by a rational constant to integer coefficients without common content."""
        from math import gcd, lcm
        den = 1
        for c in self.coeffs:
            for x in c.coeffs():
                den = lcm(den, x.denominator)
        ints = [[int(x * den) for x in c.coeffs()] for c in self.coeffs]
        g = 0
        for row in ints:
            for x in row:
                g = gcd(g, x)
        lead = ints[-1][-1]
        if lead < 0:
            g = -g
        return RecOperator([Poly([Fraction(x, g) for x in row], "n") for row in ints])

    def apply(self, u: Sequence, n: int):
        """``(R u)_n`` for a sequence given as a list."""
        acc = 0
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                acc = acc + c(n) * u[n + k]
        return acc

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            s = f"({c})"
            if k == 1:
                s += "*S"
            elif k > 1:
                s += f"*S^{k}"
            terms.append(s)
        return " + ".join(terms)

    def __repr__(self):
        return f"RecOperator({self})"


@dataclass(frozen=True)
class ShapeInfo:
    order: int
    valuation: int
    nonsingular: bool
    reversible: bool
    singular_roots: tuple
    nonreversible_roots: tuple


def check_shape(R: RecOperator) -> ShapeInfo:
    s, m = R.order, R.valuation
    sing = tuple(R[s].nonneg_integer_roots())
    rev = tuple(R[m].nonneg_integer_roots())
    return ShapeInfo(s, m, not sing, not rev, sing, rev)


def shift_valuation(R: RecOperator) -> RecOperator:
    """``R S^{-m}`` where ``m`` is the valuation in ``S``; it annihilates ``(u_{n+m})``."""
    m = R.valuation
    if m == 0:
        return R
    return RecOperator(R.coeffs[m:])


# ---------------------------------------------------------------------------
# Newton polygon

@dataclass(frozen=True)
class NewtonEdge:
    slope: Fraction
    left: tuple  # (k, d_k)
    right: tuple
    points: tuple  # lattice points (k, d_k) on the edge
    char_poly: Poly  # in lambda, tagged "z"

    @property
    def kappa(self) -> Fraction:
        return -self.slope


@dataclass(frozen=True)
class NewtonPolygon:
    edges: tuple

    @property
    def kappa(self) -> Fraction:
        """Negated slope of the rightmost edge."""
        return self.edges[-1].kappa


def newton_polygon(R: RecOperator) -> NewtonPolygon:
    pts = [(k, c.degree()) for k, c in enumerate(R.coeffs) if not c.is_zero()]
    if len(pts) < 2:
        raise DomainError("single-term operator has no Newton polygon")
    lead = {k: R[k].lc() for k, _ in pts}
    # upper hull by monotone chain (points sorted by k)
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # remove hull[-1] if it lies on or below segment hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    edges = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        on = tuple((k, d) for k, d in pts if x1 <= k <= x2 and Fraction(d - y1) == slope * (k - x1))
        chi = [Fraction(0)] * (x2 - x1 + 1)
        for k, _ in on:
            chi[k - x1] = lead[k]
        edges.append(NewtonEdge(slope, (x1, y1), (x2, y2), on, Poly(chi, "z")))
    return NewtonPolygon(tuple(edges))


# ---------------------------------------------------------------------------
# Unrolling

def _integer_rows(R: RecOperator):
    from math import lcm
    den = 1
    for c in R.coeffs:
        for x in c.coeffs():
            den = lcm(den, x.denominator)
    return [[int(x * den) for x in c.coeffs()] for c in R.coeffs]


def _horner_int(cs, n):
    acc = 0
    for c in reversed(cs):
        acc = acc * n + c
    return acc


def unroll(R: RecOperator, init: Sequence, N: int) -> list:
    """Exact terms ``u_0, ..., u_{N-1}`` of the solution with the given initial values.

    Values are Fractions when all initial values are real, else GaussianRationals.
    """
    s = R.order
    if len(init) != s:
        raise DomainError(f"expected {s} initial values, got {len(init)}")
    complex_mode = any(isinstance(x, GaussianRational) and x.im != 0 for x in init)
    if complex_mode:
        re = unroll(R, [GaussianRational.coerce(x).re for x in init], N)
        im = unroll(R, [GaussianRational.coerce(x).im for x in init], N)
        return [GaussianRational(a, b) for a, b in zip(re, im)]
    vals = [GaussianRational.coerce(x).re if isinstance(x, GaussianRational) else to_fraction(x)
            for x in init]
    rows = _integer_rows(R)
    lead = rows[s]
    out = list(vals[:N])
    n = 0
    while len(out) < N:
        bs = _horner_int(lead, n)
        if bs == 0:
            raise PreconditionError(
                f"leading coefficient vanishes at n = {n}: cannot compute u_{n + s}")
        acc = Fraction(0)
        for k in range(s):
            if rows[k]:
                c = _horner_int(rows[k], n)
                if c:
                    acc += c * out[n + k]
        out.append(-acc / bs)
        n += 1
    return out


def unroll_balls(R: RecOperator, init: Sequence, N: int):
    """Real balls for ``u_0, ..., u_{N-1}`` at the current precision, or ``None``.

    ``None`` is returned as soon as a ball that is not exactly zero contains
    zero, i.e. when the working precision no longer separates it from zero.
    Initial values must be real.
    """
    from flint import arb
    s = R.order
    rows = _integer_rows(R)
    lead = rows[s]
    out = []
    for x in init[:N]:
        x = to_fraction(x)
        out.append(arb(x.numerator) / x.denominator)
    n = 0
    while len(out) < N:
        bs = _horner_int(lead, n)
        if bs == 0:
            raise PreconditionError(
                f"leading coefficient vanishes at n = {n}: cannot compute u_{n + s}")
        acc = arb(0)
        for k in range(s):
            if rows[k]:
                c = _horner_int(rows[k], n)
                if c:
                    acc += c * out[n + k]
        v = -acc / bs
        if v.rad() != 0 and 0 in v:
            return None
        out.append(v)
        n += 1
    return out


def unroll_bounds(R: RecOperator, init_bounds: Sequence[Fraction], N: int) -> list[Fraction]:
    """Upper bounds on ``|u_n|`` for every solution with ``|u_k| <= init_bounds[k]`` (k < s)."""
    s = R.order
    if len(init_bounds) != s:
        raise DomainError(f"expected {s} initial bounds, got {len(init_bounds)}")
    rows = _integer_rows(R)
    out = [abs(to_fraction(x)) for x in init_bounds][:N]
    n = 0
    while len(out) < N:
        bs = _horner_int(rows[s], n)
        if bs == 0:
            raise PreconditionError(
                f"leading coefficient vanishes at n = {n}: cannot compute u_{n + s}")
        acc = Fraction(0)
        for k in range(s):
            if rows[k]:
                acc += abs(_horner_int(rows[k], n)) * out[n + k]
        out.append(acc / abs(bs))
        n += 1
    return out


# ---------------------------------------------------------------------------
# Symmetric product

def _rat_zero():
    return RatFun(Poly([], "n"))


def symmetric_product(R1: RecOperator, R2: RecOperator) -> RecOperator:
    """An operator annihilating ``x_n y_n`` whenever ``R1 x = 0`` and ``R2 y = 0``.

    Linear algebra over Q(n) in the module spanned by ``x_{n+i} y_{n+j}``.
    Denominators are cleared and constant content removed; no polynomial
    factor is cancelled so the relation keeps holding for every n where
    both inputs determine their sequences.
    """
    s1, s2 = R1.order, R2.order
    if s1 == 0 or s2 == 0:
        raise DomainError("symmetric product with an order-0 operator")
    dim = s1 * s2

    def shift_rule(R, s):
        # x_{n+s} = sum_k rule[k](n) x_{n+k}
        lead = RatFun(R[s])
        return [RatFun(-R[k]) / lead for k in range(s)]

    rule1 = shift_rule(R1, s1)
    rule2 = shift_rule(R2, s2)

    # express x_{n+t} in the basis, for t = 0..dim
    xs = []
    v = [RatFun(Poly([1 if i == 0 else 0], "n")) for i in range(s1)]
    for t in range(dim + 1):
        xs.append(v)
        v = _shift_coords(v, rule1, s1)
    ys = []
    w = [RatFun(Poly([1 if j == 0 else 0], "n")) for j in range(s2)]
    for t in range(dim + 1):
        ys.append(w)
        w = _shift_coords(w, rule2, s2)
    vectors = []
    for t in range(dim + 1):
        vec = [xs[t][i] * ys[t][j] for i in range(s1) for j in range(s2)]
        vectors.append(vec)
        rel = _find_relation(vectors)
        if rel is not None:
            return _clear_denominators(rel)
    raise InternalError("symmetric product: no relation found")


def _shift_coords(v, rule, s):
    out = [_rat_zero() for _ in range(s)]
    for i, c in enumerate(v):
        if c.is_zero():
            continue
        cs = RatFun(c.num.shift(1), c.den.shift(1))
        if i + 1 < s:
            out[i + 1] = out[i + 1] + cs
        else:
            for k in range(s):
                out[k] = out[k] + cs * rule[k]
    return out


def _find_relation(vectors):
    """Nontrivial ``c`` with ``sum_t c_t vectors[t] = 0`` using the last vector, or None."""
    T = len(vectors)
    rows = len(vectors[0])
    # matrix M[row][t]
    M = [[vectors[t][r] for t in range(T)] for r in range(rows)]
    # Gaussian elimination to reduced row echelon form over Q(n)
    pivots = []
    r = 0
    for col in range(T):
        piv = None
        for i in range(r, rows):
            if not M[i][col].is_zero():
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = RatFun(M[r][col].den, M[r][col].num)
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and not M[i][col].is_zero():
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    if len(pivots) == T:
        return None
    f = T - 1
    if f in pivots:
        return None
    c = [_rat_zero() for _ in range(T)]
    c[f] = RatFun(Poly([1], "n"))
    for row, col in enumerate(pivots):
        c[col] = -M[row][f]
    return c


def _clear_denominators(rel) -> RecOperator:
    den = Poly([1], "n")
    for c in rel:
        if not c.is_zero():
            g = den.gcd(c.den)
            den = den * (c.den // g)
    coeffs = []
    for c in rel:
        if c.is_zero():
            coeffs.append(Poly([], "n"))
        else:
            coeffs.append(c.num * (den // c.den))
    return RecOperator(coeffs).primitive()


# ---------------------------------------------------------------------------
# theta operators

class DiffOperatorTheta:
    """``sum_k a_k(z) theta^k`` with ``theta = z d/dz``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        cs = _trim(_as_poly(c, "z") for c in coeffs)
        if not cs:
            raise DomainError("zero differential operator")
        self.coeffs = cs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k) -> Poly:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Poly([], "z")

    def __eq__(self, other):
        return isinstance(other, DiffOperatorTheta) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        m = max(len(self.coeffs), len(other.coeffs))
        return DiffOperatorTheta([self[k] + other[k] for k in range(m)])

    def __mul__(self, other):
        if not isinstance(other, DiffOperatorTheta):
            return DiffOperatorTheta([c * other for c in self.coeffs])
        # theta^i b(z) = sum_l b_l z^l (theta + l)^i
        out = [Poly([], "z")] * (self.order + other.order + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                for l, bl in enumerate(b.coeffs()):
                    if bl == 0:
                        continue
                    # (theta + l)^i theta^j expanded in powers of theta
                    binom = Poly([l, 1], "z") ** i  # in theta, tagged z temporarily
                    for e, ce in enumerate(binom.coeffs()):
                        if ce:
                            term = a * Poly([0] * l + [bl * ce], "z")
                            out[e + j] = out[e + j] + term
        return DiffOperatorTheta(out)

    def apply_series(self, u: Sequence) -> list:
        """Coefficients of ``D u`` up to ``len(u)``; exact for indices below ``len(u)``."""
        N = len(u)
        out = [0] * N
        for k, a in enumerate(self.coeffs):
            for l, al in enumerate(a.coeffs()):
                if al == 0:
                    continue
                for n in range(0, N - l):
                    if u[n]:
                        out[n + l] = out[n + l] + al * (n ** k) * u[n]
        return out

    def apply_series_balls(self, u: Sequence) -> list:
        """Same as :meth:`apply_series` for ball-valued coefficients."""
        from flint import arb
        N = len(u)
        out = [arb(0)] * N
        for k, a in enumerate(self.coeffs):
            for l, al in enumerate(a.coeffs()):
                if al == 0:
                    continue
                c = arb(al.numerator) / al.denominator
                for n in range(0, N - l):
                    out[n + l] = out[n + l] + c * (n ** k) * u[n]
        return out

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            s = f"({c})"
            if k == 1:
                s += "*theta"
            elif k > 1:
                s += f"*theta^{k}"
            terms.append(s)
        return " + ".join(terms)

    def __repr__(self):
        return f"DiffOperatorTheta({self})"
