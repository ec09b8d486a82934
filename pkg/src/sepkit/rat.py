"""Exact rational arithmetic helpers.

All coordinates, slopes, intercepts and squared distances in this package are
arbitrary-precision rationals.  gmpy2.mpq is used as the carrier (it is a
canonical num/den pair with den > 0), with fractions.Fraction as a drop-in
fallback when gmpy2 is unavailable.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

try:
    from gmpy2 import mpq as _mpq

    def Rat(*args) -> "RatT":
        if len(args) == 1:
            a = args[0]
            if isinstance(a, str):
                return _rat_from_str(a)
            if isinstance(a, float):
                f = Fraction(a)
                return _mpq(f.numerator, f.denominator)
            return _mpq(a)
        return _mpq(*args)

    _HAVE_GMPY = True
except ImportError:  # pragma: no cover
    _mpq = Fraction

    def Rat(*args) -> "RatT":
        if len(args) == 1 and isinstance(args[0], str):
            return _rat_from_str(args[0])
        return Fraction(*args)

    _HAVE_GMPY = False

RatT = type(_mpq(0))
RatLike = Union[int, str, RatT]

R0 = Rat(0)
R1 = Rat(1)


def _rat_from_str(s: str) -> RatT:
    """Parse '3', '-0.25' or '1/3' into an exact rational."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        f = Fraction(int(num), int(den))
    else:
        f = Fraction(s)  # exact decimal parse
    return _mpq(f.numerator, f.denominator)


def rat(value: RatLike) -> RatT:
    """Coerce ints, strings and rationals to the canonical rational type."""
    if isinstance(value, RatT):
        return value
    if isinstance(value, int):
        return _mpq(value)
    if isinstance(value, str):
        return _rat_from_str(value)
    if isinstance(value, Fraction):
        return _mpq(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to rational")


def num(x: RatT) -> int:
    return int(x.numerator)


def den(x: RatT) -> int:
    return int(x.denominator)


def rat_str(x: RatT) -> str:
    """Render exactly: integer as '3', otherwise 'n/d'."""
    x = rat(x)
    if den(x) == 1:
        return str(num(x))
    return f"{num(x)}/{den(x)}"


def rat_decimal_str(x: RatT) -> str:
    """Render exactly as a decimal when the denominator is 2^a*5^b, else 'n/d'."""
    x = rat(x)
    n, d = num(x), den(x)
    if d == 1:
        return str(n)
    d2 = d
    e2 = e5 = 0
    while d2 % 2 == 0:
        d2 //= 2
        e2 += 1
    while d2 % 5 == 0:
        d2 //= 5
        e5 += 1
    if d2 != 1:
        return f"{n}/{d}"
    digits = max(e2, e5)
    scaled = abs(n) * 10**digits // d
    sign = "-" if n < 0 else ""
    s = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def sqrt_decimal_str(x: RatT, sig: int = 12) -> str:
    """Decimal rendering of sqrt(x) to `sig` significant digits, round-half-even.

    x must be a non-negative rational; the result is a plain decimal string.
    """
    x = rat(x)
    if x < 0:
        raise ValueError("sqrt of negative rational")
    if x == 0:
        return "0"
    n, d = num(x), den(x)
    # exponent e with 10^(e-1) <= sqrt(n/d) < 10^e
    e = 0
    while n < d * 10 ** (2 * e):
        e -= 1
    while n >= d * 10 ** (2 * (e + 1)):
        e += 1
    e += 1
    # digits = round(sqrt(n/d) * 10^(sig - e)) with half-even ties
    shift = sig - e
    if shift >= 0:
        scaled_n, scaled_d = n * 10 ** (2 * shift), d
    else:
        scaled_n, scaled_d = n, d * 10 ** (-2 * shift)
    q = isqrt(scaled_n // scaled_d)
    # candidates q, q+1; value v = sqrt(scaled_n/scaled_d) in [q, q+1)
    # round-half-even: compare v with q + 1/2 exactly: (2q+1)^2*scaled_d vs 4*scaled_n
    lhs = (2 * q + 1) ** 2 * scaled_d
    rhs = 4 * scaled_n
    if lhs < rhs or (lhs == rhs and q % 2 == 1):
        q += 1
    digits = str(q)
    if len(digits) > sig:  # rounding bumped into the next decade
        digits = digits[:sig]
        e += 1
    # place the decimal point: value = 0.digits * 10^e
    if 0 < e <= sig:
        out = digits[:e] + ("." + digits[e:] if e < sig else "")
    elif e <= 0:
        out = "0." + "0" * (-e) + digits
    else:
        out = digits + "0" * (e - sig)
    return out.rstrip(".") if out.endswith(".") else out


def rat_sqrt_exact(x: RatT) -> RatT | None:
    """Exact rational square root, or None when x is not a perfect square."""
    x = rat(x)
    if x < 0:
        return None
    n, d = num(x), den(x)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Rat(rn, rd)
    return None
