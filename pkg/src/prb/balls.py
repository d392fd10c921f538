"""Helpers around FLINT ball arithmetic: conversions and precision control."""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction

from flint import arb, ctx, fmpq

from .errors import DomainError, PrecisionError

MIN_PREC = 64
MAX_PREC = 4096


@contextmanager
def precision(bits: int):
    """Run a block at ``bits`` of working precision.

    FLINT's precision is process global, so this is not thread safe.
    """
    with ctx.workprec(max(int(bits), 2)):
        yield


def precisions(start: int = MIN_PREC, cap: int = MAX_PREC):
    """Doubling precision schedule ``start, 2*start, ...`` up to ``cap``."""
    p = max(int(start), 2)
    while p <= cap:
        yield p
        p *= 2


def ball(x) -> arb:
    """Ball containing the exact rational ``x`` at the current precision."""
    if isinstance(x, arb):
        return x
    if isinstance(x, Fraction):
        d = x.denominator
        if d.bit_count() == 1:
            # dyadic: exact and cheap even for huge exponents
            return arb((x.numerator, 1 - d.bit_length()))
        return arb(fmpq(x.numerator, d))
    return arb(x)


def _dyadic(x: arb) -> Fraction:
    if not x.is_finite():
        raise PrecisionError("non-finite ball endpoint")
    man, exp = x.mid().man_exp()
    return _from_man_exp(int(man), int(exp))


def upper(x: arb) -> Fraction:
    """Exact dyadic upper endpoint of a ball."""
    return _dyadic(x.upper())


def lower(x: arb) -> Fraction:
    """Exact dyadic lower endpoint of a ball."""
    return _dyadic(x.lower())


def abs_upper(x) -> Fraction:
    return _dyadic(x.abs_upper())


def abs_lower(x) -> Fraction:
    return _dyadic(x.abs_lower())


def round_up(x: Fraction, bits: int = 64) -> Fraction:
    """Smallest dyadic with a ``bits``-bit mantissa that is ``>= x``."""
    if x == 0:
        return Fraction(0)
    num, den = x.numerator, x.denominator
    e = abs(num).bit_length() - den.bit_length() - bits
    # m = ceil(x / 2^e), with shifts instead of Fraction powers
    if e >= 0:
        m = -((-num) // (den << e))
    else:
        m = -((-num << -e) // den)
    return _from_man_exp(m, e)


def _from_man_exp(m: int, e: int) -> Fraction:
    if m == 0:
        return Fraction(0)
    tz = (m & -m).bit_length() - 1
    m >>= tz
    e += tz
    if e >= 0:
        return Fraction(m << e)
    return Fraction(m, 1 << -e)


def round_down(x: Fraction, bits: int = 64) -> Fraction:
    return -round_up(-x, bits)


def log2_floor(x: Fraction) -> int:
    if x <= 0:
        raise DomainError("logarithm of a nonpositive number")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** e > x:
        e -= 1
    while Fraction(2) ** (e + 1) <= x:
        e += 1
    return e


def is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def dyadic_hex(x: Fraction) -> str:
    """Lossless hexadecimal rendering of a dyadic rational, e.g. ``0x1.8p+1``."""
    if not is_dyadic(x):
        raise DomainError("not a dyadic rational")
    if x == 0:
        return "0x0p+0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = -(x.denominator.bit_length() - 1)
    m = x.numerator
    while m % 2 == 0:
        m //= 2
        e += 1
    # normalise to 1.xxx form
    nb = m.bit_length() - 1
    frac_bits = m - (1 << nb)
    exp = e + nb
    if nb == 0:
        return f"{sign}0x1p{exp:+d}"
    pad = (nb + 3) // 4
    frac_bits <<= pad * 4 - nb
    return f"{sign}0x1.{frac_bits:0{pad}x}p{exp:+d}"


def parse_dyadic_hex(s: str) -> Fraction:
    s = s.strip()
    sign = 1
    if s.startswith("-"):
        sign, s = -1, s[1:]
    if not s.lower().startswith("0x"):
        raise DomainError(f"not a hex float: {s!r}")
    mant, _, exp = s[2:].lower().partition("p")
    ip, _, fp = mant.partition(".")
    val = Fraction(int(ip or "0", 16))
    if fp:
        val += Fraction(int(fp, 16), 16 ** len(fp))
    return sign * val * Fraction(2) ** int(exp or "0")


def decimal_up(x: Fraction, digits: int = 20) -> str:
    """Decimal string with ``digits`` significant digits, rounded towards +infinity."""
    return _decimal(x, digits, up=True)


def decimal_down(x: Fraction, digits: int = 20) -> str:
    return _decimal(x, digits, up=False)


def _decimal(x: Fraction, digits: int, up: bool) -> str:
    if x == 0:
        return "0"
    neg = x < 0
    ax = -x if neg else x
    # magnitude: 10^e <= ax < 10^(e+1)
    e = len(str(ax.numerator)) - len(str(ax.denominator))
    while Fraction(10) ** e > ax:
        e -= 1
    while Fraction(10) ** (e + 1) <= ax:
        e += 1
    scale = Fraction(10) ** (digits - 1 - e)
    scaled = ax * scale
    # rounding direction for the magnitude depends on the sign
    toward_larger = up != neg
    m = math.ceil(scaled) if toward_larger else math.floor(scaled)
    if m == 0:
        return "0"
    s = str(m)
    exp10 = e - (digits - 1) + (len(s) - digits)
    # strip trailing zeros
    s = s.rstrip("0") or "0"
    exp10 += len(str(m)) - len(s)
    point = len(s) + exp10
    if 0 < point <= 25:
        text = s[:point] + ("." + s[point:] if point < len(s) else "0" * (point - len(s)))
    elif -6 < point <= 0:
        text = "0." + "0" * (-point) + s
    else:
        mant = s[0] + ("." + s[1:] if len(s) > 1 else "")
        text = f"{mant}e{point - 1:+d}"
    return ("-" if neg else "") + text
