"""Input validation helpers shared by the modules and the CLI."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational

from sympy import factorint


class InputError(ValueError):
    """Malformed or out-of-contract input."""


def check_int_matrix(A, name="matrix", square=False, allow_empty=False) -> list[list[int]]:
    if A is None:
        raise InputError(f"{name}: missing")
    try:
        rows = [list(r) for r in A]
    except TypeError:
        raise InputError(f"{name}: expected a list of rows") from None
    if not rows:
        if allow_empty:
            return []
        raise InputError(f"{name}: empty matrix")
    width = len(rows[0])
    out = []
    for r in rows:
        if len(r) != width:
            raise InputError(f"{name}: ragged rows")
        for x in r:
            if isinstance(x, bool) or not isinstance(x, Integral):
                raise InputError(f"{name}: non-integer entry {x!r}")
        out.append([int(x) for x in r])
    if square and width != len(out):
        raise InputError(f"{name}: expected a square matrix, got {len(out)}x{width}")
    return out


@lru_cache(maxsize=4096)
def factorize(n: int) -> dict[int, int]:
    return dict(factorint(int(n)))


def is_prime(n: int) -> bool:
    f = factorize(n) if n > 1 else {}
    return n > 1 and list(f.values()) == [1]


def check_prime_power(n: int) -> tuple[int, int]:
    """Return ``(q, e)`` with ``n == q**e``; reject anything else."""
    if isinstance(n, bool) or not isinstance(n, Integral) or n < 2:
        raise InputError(f"{n!r} is not a prime power")
    f = factorize(int(n))
    if len(f) != 1:
        raise InputError(f"{n} is not a prime power")
    (q, e), = f.items()
    return q, e


def parse_rational(x) -> Fraction:
    """Accept ints, Fractions and strings like ``"7/2"``; never floats."""
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, (Integral, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational: {x!r}") from None
    raise InputError(f"not an exact rational: {x!r}")


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
