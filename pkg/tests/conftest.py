from fractions import Fraction
from pathlib import Path

import pytest

from prb.modulus import dominant_modulus

from prb.arith import GaussianRational, Poly, RatFun
from prb.operators import RecOperator
from prb.parse import parse_problem

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

n = Poly.gen("n")
z = Poly.gen("z")


def rec(*coeffs) -> RecOperator:
    return RecOperator([c if isinstance(c, Poly) else Poly([Fraction(c)], "n") for c in coeffs])


def load(name: str):
    return parse_problem((PROBLEMS / f"{name}.json").read_text(), name)


C3, CA, CB = 640320 ** 3, 13591409, 545140134

EX1A = rec(-1, -(n + 2), 0, 2)
INVOLUTIONS = rec(-(n + 1), -1, 1)
APERY = rec((n + 1) ** 3, -(2 * n + 3) * (17 * n ** 2 + 51 * n + 39), (n + 2) ** 3)
CHUDNOVSKY = RecOperator([8 * (6 * n + 1) * (6 * n + 3) * (6 * n + 5) * (CA + CB + CB * n),
                          (n + 1) ** 3 * C3 * (CA + CB * n)])
SI = rec(n, 0, (n + 1) * (n + 2) ** 2)
COS = rec(1, 0, (n + 1) * (n + 2))
ERF2 = rec(8 * n, 0, (n + 2) * (6 * n + 8), 0, (n + 2) * (n + 3) * (n + 4))

# (name, operator, initial values, allow_nonreversible)
CORPUS = [
    ("ex1a", EX1A, [1, 1, 1], False),
    ("involutions", INVOLUTIONS, [1, 1], False),
    ("apery", APERY, [1, 5], False),
    ("chudnovsky", CHUDNOVSKY, [CA], False),
    ("si", SI, [0, 1], True),
    ("cos", COS, [1, 0], False),
    ("sin", COS, [0, 1], False),
    ("erf2", ERF2, [0, 0, 1, 0], True),
]


@pytest.fixture(scope="session")
def corpus_bounds():
    from prb.seqbounds import bound_rec
    return {name: bound_rec(R, init, allow_nonreversible=anr) for name, R, init, anr in CORPUS}


ONE_Z = Poly([1], "z")


def random_ratfun_case(rng):
    """A triple (r, P_alpha, m) that usually meets the rational majorant precondition."""
    # denominators built from linear and quadratic factors with small rational roots
    factors = []
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.6:
            c = Fraction(rng.choice([1, 2, 3, 4, 5]), rng.choice([1, 2, 3]))
            f = 1 - rng.choice([1, -1]) * z / c
        else:
            a, b = rng.randint(-3, 3), rng.randint(1, 4)
            f = Poly([Fraction(b), Fraction(a), Fraction(rng.randint(1, 3))], "z")
        factors.append((f, rng.randint(1, 2)))
    D = ONE_Z
    for f, e in factors:
        D = D * f ** e
    N = Poly([Fraction(rng.randint(-4, 4)) for _ in range(rng.randint(1, D.degree() + 2))], "z")
    if N.is_zero():
        N = ONE_Z
    r = RatFun(N, D)
    dD = dominant_modulus(D)
    if rng.random() < 0.5:
        # P_alpha = D, m = multiplicity of the dominant roots
        return r, D, dD.ord + rng.randint(0, 1)
    lo, _ = dD.enclosure(32)
    c = lo * Fraction(rng.randint(1, 9), 10)
    return r, 1 - z / c, rng.randint(1, 3)


def _no_nonneg_int_root(p: Poly) -> bool:
    return not p.is_zero() and not p.nonneg_integer_roots()


def random_recurrence(rng, max_order=3, max_deg=2):
    """A random nonsingular, reversible operator and Gaussian rational initial values."""
    while True:
        s = rng.randint(1, max_order)
        cs = [Poly([Fraction(rng.randint(-5, 5)) for _ in range(rng.randint(1, max_deg + 1))], "n")
              for _ in range(s + 1)]
        if _no_nonneg_int_root(cs[0]) and _no_nonneg_int_root(cs[s]):
            break
    init = [GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                             Fraction(rng.randint(-9, 9), rng.randint(1, 9))) for _ in range(s)]
    return RecOperator(cs), init
