"""Brute-force checks used by the test suite and the ``check`` command.

Nothing here relies on majorants: sequences are unrolled exactly and series
are summed directly in ball arithmetic.  The only exception is the remainder
past the summation cutoff in :func:`minimal_truncation_order`, which is far
below the target accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from flint import acb, arb

from .arith import GaussianRational, to_fraction
from .balls import ball, precision, upper
from .errors import DomainError, PrecisionError
from .operators import RecOperator, unroll
from .seqbounds import BoundParams, evaluate_bound


@dataclass
class OracleReport:
    checked: tuple[int, int]
    violations: list = field(default_factory=list)  # (n, claimed bound, upper bound on |u_n|)
    minimal_N: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        from .balls import dyadic_hex, decimal_up
        return {
            "checked": list(self.checked),
            "violations": [
                {"n": n, "bound": decimal_up(bd, 17), "value": decimal_up(v, 17)}
                for n, bd, v in self.violations
            ],
            "minimal_N": self.minimal_N,
        }


def _norm(x) -> Fraction:
    if isinstance(x, GaussianRational):
        return x.norm()
    return Fraction(x) ** 2


def check_certificate(R: RecOperator, init: Sequence, b: BoundParams, N: int) -> OracleReport:
    """Compare exact ``|u_n|`` with ``evaluate_bound(b, n)`` for ``n < N``."""
    vals = unroll(R, list(init), N)
    report = OracleReport((0, N))
    for n, u in enumerate(vals):
        bd = evaluate_bound(b, n)
        if _norm(u) > bd * bd:
            with precision(96):
                mag = upper(u.abs_arb()) if isinstance(u, GaussianRational) else abs(Fraction(u))
            report.violations.append((n, bd, mag))
    return report


def _to_ball(x):
    if isinstance(x, GaussianRational):
        return acb(ball(x.re), ball(x.im))
    return ball(to_fraction(x))


def series_terms(R: RecOperator, init: Sequence, z, N: int, j: int = 0) -> list:
    """Exact terms ``[z^k] u^{(j)} * z^k`` for ``k < N``."""
    vals = unroll(R, list(init), N + j)
    z = z if isinstance(z, GaussianRational) else to_fraction(z)
    out = []
    zk = Fraction(1) if not isinstance(z, GaussianRational) else GaussianRational(Fraction(1), Fraction(0))
    for k in range(N):
        c = vals[k + j] * math.perm(k + j, j)
        out.append(c * zk)
        zk = zk * z
    return out


def direct_tail(R: RecOperator, init: Sequence, z, n: int, N_ref: int, j: int = 0,
                bits: int = 256):
    """Ball for ``sum_{n <= k < N_ref} [z^k] u^{(j)} z^k``."""
    terms = series_terms(R, init, z, N_ref, j)
    with precision(bits):
        acc = arb(0)
        for t in terms[n:]:
            acc = acc + _to_ball(t)
        return acc


def minimal_truncation_order(R: RecOperator, init: Sequence, kappa, z, eps, work_bits: int | None = None,
                             start: int = 0, remainder=None) -> int:
    """Least ``N`` such that ``|u(z) - u_{;N}(z)| <= eps`` for every index in ``[N, start]``.

    ``u(z)`` is replaced by a partial sum up to ``N_ref = 2 start + 32``;
    ``remainder`` (a Fraction, default 0) bounds what lies beyond it.  The
    search goes down from ``start`` (up if ``start`` is not itself valid).
    Each decision is certified with balls at ``work_bits``; undecidable cases
    raise :class:`PrecisionError`.
    """
    if Fraction(kappa) > 0:
        raise DomainError("divergent series")
    if isinstance(eps, arb):
        eps_ball = eps
        e_lo = eps.lower()
    else:
        eps = to_fraction(eps)
        eps_ball = None
    if work_bits is None:
        mag = eps.denominator.bit_length() - eps.numerator.bit_length() if eps_ball is None else \
            int(-float(e_lo.log() / arb(2).log())) + 1
        work_bits = 4 * max(mag, 1) + 64
    N_ref = 2 * start + 32
    rem = Fraction(remainder or 0)
    terms = series_terms(R, init, z, N_ref)
    with precision(work_bits):
        e = eps_ball if eps_ball is not None else ball(eps)
        # suffix[N] = sum_{N <= k < N_ref} terms[k]
        suffix = [None] * (N_ref + 1)
        acc = arb(0)
        suffix[N_ref] = acc
        for k in range(N_ref - 1, -1, -1):
            acc = acc + _to_ball(terms[k])
            suffix[k] = acc
        r = ball(rem)

        def status(N):
            mag = abs(suffix[N])
            hi = mag + r
            lo = mag - r
            if hi <= e:
                return True
            if lo > e:
                return False
            raise PrecisionError(f"cannot decide the tail at N = {N}; increase work_bits")

        N = start
        if not status(N):
            while not status(N):
                N += 1
                if N >= N_ref:
                    raise PrecisionError("summation cutoff reached before the tail dropped below eps")
            return N
        while N > 0 and status(N - 1):
            N -= 1
        return N
