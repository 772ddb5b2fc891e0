"""Tristram-Levine signatures and their integral over the circle.

For a Seifert matrix V and a unit complex number w the signature of the
Hermitian matrix (1 - w) V + (1 - conj w) V^T only changes at roots of the
Alexander polynomial det(V - t V^T).  We locate those roots exactly
(x = t + 1/t = 2 cos theta turns the palindromic polynomial into a real
polynomial G(x) whose roots in (-2, 2) are the unit-circle roots), evaluate
the signature on each arc at a point with rational coordinates using exact
symmetric elimination, and read everything else off that table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import mpmath
import sympy

from ._validation import InputError, check_int_matrix

_t, _x = sympy.symbols("t x")


# ---------------------------------------------------------------------------
# exact inertia


def symmetric_signature(A: Sequence[Sequence[Fraction]]) -> int:
    """Signature (positives minus negatives) of a rational symmetric matrix."""
    M = [[Fraction(v) for v in row] for row in A]
    n = len(M)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if M[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and M[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j gives diagonal entry 2 M[i][j] != 0
            for k in range(n):
                M[i][k] += M[j][k]
            for k in range(n):
                M[k][i] += M[k][j]
            piv = i
        d = M[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        row = M[piv]
        for i in active:
            f = M[i][piv] / d
            if f:
                Mi = M[i]
                for k in active:
                    Mi[k] -= f * row[k]
        for i in active:
            M[i][piv] = M[piv][i] = Fraction(0)
    return pos - neg


def _hermitian_signature(V, c: Fraction, s: Fraction) -> int:
    """Signature of (1-w)V + (1-conj w)V^T at w = c + i s (c, s rational)."""
    n = len(V)
    X = [[(1 - c) * (V[i][j] + V[j][i]) for j in range(n)] for i in range(n)]
    Y = [[-s * (V[i][j] - V[j][i]) for j in range(n)] for i in range(n)]
    big = [X[i] + [-y for y in Y[i]] for i in range(n)] + [Y[i] + X[i] for i in range(n)]
    sig = symmetric_signature(big)
    return sig // 2


def rational_circle_point(u: Fraction) -> tuple[Fraction, Fraction]:
    """(cos, sin) of 2 atan(u); u in (0, inf) covers the open upper half circle."""
    u = Fraction(u)
    d = 1 + u * u
    return (1 - u * u) / d, 2 * u / d


# ---------------------------------------------------------------------------
# Seifert matrices and Alexander polynomials


@dataclass(frozen=True)
class SeifertMatrix:
    V: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = check_int_matrix(self.V, "Seifert matrix", square=True, allow_empty=True)
        object.__setattr__(self, "V", tuple(map(tuple, rows)))
        n = len(rows)
        if n % 2:
            raise InputError("Seifert matrix of a knot has even size")
        if n:
            d = sympy.Matrix(n, n, lambda i, j: rows[i][j] - rows[j][i]).det()
            if abs(d) != 1:
                raise InputError(f"det(V - V^T) = {d}, expected +-1")

    @property
    def size(self) -> int:
        return len(self.V)

    @classmethod
    def from_json(cls, data) -> "SeifertMatrix":
        if isinstance(data, dict):
            if "V" not in data:
                raise InputError("Seifert file: missing field 'V'")
            data = data["V"]
        return cls(data)

    def mirror(self) -> "SeifertMatrix":
        return SeifertMatrix(tuple(tuple(-self.V[j][i] for j in range(self.size)) for i in range(self.size)))

    def __add__(self, other: "SeifertMatrix") -> "SeifertMatrix":
        return block_sum([self, other])


def block_sum(mats: Sequence[SeifertMatrix]) -> SeifertMatrix:
    n = sum(m.size for m in mats)
    out = [[0] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i in range(m.size):
            for j in range(m.size):
                out[off + i][off + j] = m.V[i][j]
        off += m.size
    return SeifertMatrix(tuple(map(tuple, out)))


def alexander_polynomial(V: SeifertMatrix) -> list[int]:
    """Coefficients (constant term first) of det(V - t V^T) with the t^k factor removed."""
    if V.size == 0:
        return [1]
    M = sympy.Matrix(V.size, V.size, lambda i, j: V.V[i][j] - _t * V.V[j][i])
    coeffs = [int(c) for c in reversed(sympy.Poly(M.det(method="berkowitz"), _t).all_coeffs())]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    return coeffs


def compact_form(coeffs: Sequence[int]) -> list[int]:
    """G with t^-m P(t) = G(t + 1/t) for a palindromic P of degree 2m (constant first)."""
    deg = len(coeffs) - 1
    if deg % 2 or any(coeffs[i] != coeffs[deg - i] for i in range(deg + 1)):
        raise ValueError("Alexander polynomial is not palindromic")
    m = deg // 2
    # D_0 = 2 (used as 1 for the middle term), D_1 = x, D_{k+1} = x D_k - D_{k-1}
    G = [0] * (m + 1)
    G[0] = coeffs[m]
    prev, cur = [2], [0, 1]
    for k in range(1, m + 1):
        c = coeffs[m + k]
        for i, a in enumerate(cur):
            G[i] += c * a
        nxt = [0] + cur
        for i, a in enumerate(prev):
            nxt[i] -= a
        prev, cur = cur, nxt
    return G


def _cyclotomic_order(g: sympy.Poly) -> Optional[int]:
    """n if g(x) is the minimal polynomial of 2 cos(2 pi / n), else None."""
    d = g.degree()
    if d < 1:
        return None
    # phi(n) = 2d and phi(n) >= sqrt(n / 2) bounds n
    for n in range(3, 8 * d * d + 3):
        if sympy.totient(n) != 2 * d:
            continue
        psi = sympy.Poly(sympy.minimal_polynomial(2 * sympy.cos(2 * sympy.pi / n), _x), _x)
        if psi.monic() == g.monic():
            return n
    return None


# ---------------------------------------------------------------------------
# the signature function


@dataclass(frozen=True)
class JumpPoint:
    """A unit-circle root exp(i theta), theta in (0, pi), of the Alexander polynomial.

    ``x_interval`` isolates x = 2 cos theta; ``turn`` is theta / 2pi as an
    exact fraction when the root is a root of unity, else None.
    """

    x_interval: tuple[Fraction, Fraction]
    factor: tuple[int, ...]
    turn: Optional[Fraction]
    cyclotomic_order: Optional[int]


@dataclass(frozen=True)
class SignatureFunction:
    alexander: tuple[int, ...]
    jumps: tuple[JumpPoint, ...]   # ordered by increasing angle
    plateaus: tuple[int, ...]      # len(jumps) + 1 values, first arc starts at angle 0
    cyclotomic_orders: frozenset

    def is_identically_zero(self) -> bool:
        return all(v == 0 for v in self.plateaus)

    def theta_over_pi_bounds(self, j: int, dps: int = 50) -> tuple[Fraction, Fraction]:
        """Certified bounds for the j-th jump angle divided by pi."""
        J = self.jumps[j]
        if J.turn is not None:
            return 2 * J.turn, 2 * J.turn
        a, b = _refine_root(J.factor, *J.x_interval, Fraction(1, 10 ** (dps + 2)))
        with mpmath.workdps(dps + 10):
            lo = mpmath.acos(mpmath.mpf(b.numerator) / b.denominator / 2) / mpmath.pi
            hi = mpmath.acos(mpmath.mpf(a.numerator) / a.denominator / 2) / mpmath.pi
            margin = Fraction(1, 10 ** dps)
            return _mpf_fraction(lo) - margin, _mpf_fraction(hi) + margin


def _refine_root(coeffs: Sequence[int], a: Fraction, b: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect the isolating interval [a, b] of a simple root down to width eps."""

    def f(x):
        acc = Fraction(0)
        for c in coeffs:  # highest degree first
            acc = acc * x + c
        return acc

    fa = f(a)
    if fa == 0:
        return a, a
    if f(b) == 0:
        return b, b
    while b - a > eps:
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def _mpf_fraction(v) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(v)._mpf_
    val = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -val if sign else val


def _separated_intervals(poly: sympy.Poly, eps: Fraction):
    iv = poly.intervals(eps=eps)
    out = [(Fraction(str(a)), Fraction(str(b))) for (a, b), _ in iv]
    out.sort()
    return out


def _x_of_u(u: Fraction) -> Fraction:
    c, _ = rational_circle_point(u)
    return 2 * c


def _u_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational u > 0 with lo < 2 cos(2 atan u) < hi  (-2 <= lo < hi <= 2)."""
    # x(u) decreases from 2 to -2 as u runs over (0, inf)
    a, b = Fraction(0), Fraction(1)
    while _x_of_u(b) >= hi:
        a, b = b, 2 * b
    while True:
        if _x_of_u(b) > lo:
            return b
        # here x(a) >= hi and x(b) <= lo
        m = (a + b) / 2
        if _x_of_u(m) >= hi:
            a = m
        else:
            b = m


@lru_cache(maxsize=256)
def _signature_function(V: tuple) -> SignatureFunction:
    S = SeifertMatrix(V)
    alex = alexander_polynomial(S)
    G = compact_form(alex)
    Gp = sympy.Poly(list(reversed(G)), _x)
    factors = [f for f, _ in Gp.factor_list()[1]] if Gp.degree() > 0 else []
    # unit-circle roots: real roots of G in (-2, 2)
    roots = []  # (interval, factor)
    for f in factors:
        for a, b in _separated_intervals(f, Fraction(1, 10 ** 12)):
            if b <= -2 or a >= 2:
                continue
            if not (-2 < a and b < 2):
                raise ArithmeticError("root isolation touched +-2")
            roots.append(((a, b), f))
    # make intervals of different factors disjoint
    eps = Fraction(1, 10 ** 12)
    while True:
        roots.sort(key=lambda r: r[0])
        clash = any(roots[i][0][1] >= roots[i + 1][0][0] for i in range(len(roots) - 1))
        if not clash:
            break
        eps /= 10 ** 6
        new = []
        for f in {id(r[1]): r[1] for r in roots}.values():
            for a, b in _separated_intervals(f, eps):
                if -2 < a and b < 2:
                    new.append(((a, b), f))
        roots = new
    # increasing angle = decreasing x
    roots.sort(key=lambda r: r[0], reverse=True)
    orders = {}
    for _, f in roots:
        key = tuple(int(c) for c in f.all_coeffs())
        if key not in orders:
            orders[key] = _cyclotomic_order(f)
    jumps = []
    for (a, b), f in roots:
        key = tuple(int(c) for c in f.all_coeffs())
        n = orders[key]
        turn = None
        if n is not None:
            # which primitive n-th root: 2 cos(2 pi k / n) in [a, b], 0 < k < n/2
            for k in range(1, (n + 1) // 2):
                if math.gcd(k, n) != 1:
                    continue
                xv = 2 * math.cos(2 * math.pi * k / n)
                if a - Fraction(1, 10 ** 9) <= Fraction(xv) <= b + Fraction(1, 10 ** 9):
                    turn = Fraction(k, n)
                    break
            if turn is None:
                raise ArithmeticError("could not place cyclotomic root")
        jumps.append(JumpPoint((a, b), key, turn, n))
    # plateau values at rational points strictly inside each arc
    bounds = [Fraction(2)] + [x for (a, b), _ in roots for x in (b, a)] + [Fraction(-2)]
    plateaus = []
    for i in range(len(roots) + 1):
        hi, lo = bounds[2 * i], bounds[2 * i + 1]
        u = _u_between(lo, hi)
        c, s = rational_circle_point(u)
        plateaus.append(_hermitian_signature(S.V, c, s))
    cyc = frozenset(n for n in orders.values() if n is not None)
    return SignatureFunction(tuple(alex), tuple(jumps), tuple(plateaus), cyc)


def signature_function(V: SeifertMatrix) -> SignatureFunction:
    return _signature_function(V.V)


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class SignatureValue:
    value: Fraction
    at_jump: bool

    def __int__(self):
        return int(self.value)


def _locate(sf: SignatureFunction, k: int, N: int) -> int:
    """Index of the arc containing exp(2 pi i k / N), which is not a root."""
    dps = 30
    while dps < 2000:
        with mpmath.workdps(dps):
            xv = 2 * mpmath.cos(2 * mpmath.pi * k / N)
            err = Fraction(1, 10 ** (dps - 5))
            xf = _mpf_fraction(xv)
        lo, hi = xf - err, xf + err
        idx = 0
        ok = True
        for J in sf.jumps:
            a, b = J.x_interval
            if lo > b:
                break  # x_omega above this root: angle smaller
            if hi < a:
                idx += 1
                continue
            ok = False
            break
        if ok:
            return idx
        dps *= 2
    raise ArithmeticError("could not separate the evaluation point from the roots")


def sigma_at(V: SeifertMatrix, k: int, N: int) -> SignatureValue:
    """Signature at exp(2 pi i k / N).

    At a root of the Alexander polynomial the average of the two one-sided
    limits is returned with ``at_jump`` set.
    """
    if N < 1:
        raise InputError("N must be positive")
    if not 0 <= k < N:
        raise InputError(f"need 0 <= k < N, got k={k}, N={N}")
    if k == 0 or V.size == 0:
        return SignatureValue(Fraction(0), False)
    g = math.gcd(k, N)
    k, N = k // g, N // g
    if 2 * k > N:
        k = N - k  # conjugate
    sf = signature_function(V)
    if N == 2:
        return SignatureValue(Fraction(sf.plateaus[-1]), False)
    if N in sf.cyclotomic_orders:
        turn = Fraction(k, N)
        for i, J in enumerate(sf.jumps):
            if J.turn == turn:
                return SignatureValue(Fraction(sf.plateaus[i] + sf.plateaus[i + 1], 2), True)
        raise ArithmeticError("root of unity listed as a root but not found among the jumps")
    return SignatureValue(Fraction(sf.plateaus[_locate(sf, k, N)]), False)


def sigma_value(V: SeifertMatrix, k: int, N: int) -> int:
    """Like :func:`sigma_at` but raises at jump points."""
    res = sigma_at(V, k, N)
    if res.at_jump:
        raise ValueError(f"exp(2 pi i {k}/{N}) is a root of the Alexander polynomial")
    return int(res.value)


# ---------------------------------------------------------------------------
# rho_0


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __add__(self, other):
        o = other if isinstance(other, RationalInterval) else RationalInterval(Fraction(other), Fraction(other))
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __mul__(self, n: int):
        a, b = self.lo * n, self.hi * n
        return RationalInterval(min(a, b), max(a, b))

    __rmul__ = __mul__

    def overlaps(self, other) -> bool:
        o = other if isinstance(other, RationalInterval) else RationalInterval(Fraction(other), Fraction(other))
        return self.lo <= o.hi and o.lo <= self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def rho0(V: SeifertMatrix, dps: int = 50) -> Union[Fraction, RationalInterval]:
    """Average of the signature function over the circle.

    Exact when every jump angle is a rational multiple of pi, otherwise a
    certified interval of width about 10^-dps.
    """
    sf = signature_function(V)
    # integral over [0, pi] divided by pi = v_last - sum_j theta_j/pi (v_j - v_{j-1})
    exact = Fraction(sf.plateaus[-1])
    lo = hi = Fraction(0)
    inexact = False
    for j in range(len(sf.jumps)):
        step = sf.plateaus[j + 1] - sf.plateaus[j]
        if step == 0:
            continue
        a, b = sf.theta_over_pi_bounds(j, dps)
        if a == b:
            exact -= step * a
            continue
        inexact = True
        if step > 0:
            lo -= step * b
            hi -= step * a
        else:
            lo -= step * a
            hi -= step * b
    if not inexact:
        return exact
    return RationalInterval(exact + lo, exact + hi)
