"""Truncated q-series with integer coefficients and the sequences read off them.

All series are in the variable ``q = exp(i pi z)``, so a lattice vector of
norm ``N`` contributes ``q^N``.  Exponents are multiples of 1/4 and are
stored as integer quarter-slots.  With this convention

* ``delta24 = q^2 prod_m (1 - q^(2m))^24 = sum_m tau(m) q^(2m)``,
* ``theta_E8 = theta3^8 - (theta2 theta4)^4 = 1 + 240 q^2 + 2160 q^4 + ...``,
* ``(theta2 theta4)^4 theta3^n / 16 = sum_m kappa_n(m) q^m``.

The ``m``-th term of a sequence is the coefficient at the ``m``-th positive
point of the series' own exponent grid (``q^(2m)`` for ``delta24``, ``q^m``
for the ``kappa`` series).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .polyspaces import Poly

__all__ = [
    "QSeries",
    "theta2",
    "theta3",
    "theta4",
    "delta24",
    "e8_theta",
    "kappa_series",
    "jacobi_thetas",
    "q_form",
    "tau",
    "mu",
    "nu",
    "kappa",
    "tau_values",
    "mu_values",
    "nu_values",
    "kappa_values",
    "SEQUENCES",
    "nonvanishing_scan",
    "harmonic_theta",
]

QUARTER = 4


def _conv(a: list, b: list, length: int) -> list:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if x:
            lim = length - i
            for j, y in enumerate(b[:lim]):
                if y:
                    out[i + j] += x * y
    return out


class QSeries:
    """Integer q-series ``sum_i coeffs[i] q^((offset + i*stride)/4)``, known below ``q^(order/4)``."""

    __slots__ = ("offset", "stride", "coeffs", "order")

    def __init__(self, offset: int, stride: int, coeffs: list, order: int):
        self.offset = int(offset)
        self.stride = max(1, int(stride))
        self.coeffs = [int(c) for c in coeffs]
        self.order = int(order)
        self._trim()

    @classmethod
    def from_terms(cls, terms: dict, order) -> "QSeries":
        """Build from ``{exponent: coefficient}`` with exponents in quarter steps."""
        slots = {}
        for e, c in terms.items():
            s = Fraction(e) * QUARTER
            if s.denominator != 1:
                raise ValidationError("exponents must be multiples of 1/4")
            if c:
                slots[int(s)] = slots.get(int(s), 0) + int(c)
        bound = Fraction(order) * QUARTER
        slots = {s: c for s, c in slots.items() if s < bound and c}
        if not slots:
            return cls(0, 1, [], math.ceil(bound))
        lo = min(slots)
        g = 0
        for s in slots:
            g = math.gcd(g, s - lo)
        g = g or 1
        coeffs = [0] * ((max(slots) - lo) // g + 1)
        for s, c in slots.items():
            coeffs[(s - lo) // g] = c
        return cls(lo, g, coeffs, math.ceil(bound))

    def _trim(self):
        c = self.coeffs
        # drop terms at or beyond the order
        keep = 0
        while keep < len(c) and self.offset + keep * self.stride < self.order:
            keep += 1
        del c[keep:]
        while c and c[-1] == 0:
            c.pop()
        lead = 0
        while lead < len(c) and c[lead] == 0:
            lead += 1
        if lead:
            del c[:lead]
            self.offset += lead * self.stride
        if c:
            g = 0
            for i, v in enumerate(c):
                if v:
                    g = math.gcd(g, i)
            if g > 1:
                self.coeffs = c[::g]
                self.stride *= g

    # access --------------------------------------------------------------------
    def terms(self) -> dict:
        return {
            Fraction(self.offset + i * self.stride, QUARTER): c
            for i, c in enumerate(self.coeffs)
            if c
        }

    def coefficient(self, exponent) -> int:
        s = Fraction(exponent) * QUARTER
        if s >= self.order:
            raise ValidationError(f"q^{exponent} lies beyond the truncation order")
        if s.denominator != 1:
            return 0
        i, r = divmod(int(s) - self.offset, self.stride)
        if r or i < 0 or i >= len(self.coeffs):
            return 0
        return self.coeffs[i]

    @property
    def grid_denominator(self) -> int:
        g = 0
        for e in self.terms():
            g = math.gcd(g, int(e * QUARTER))
        g = math.gcd(g, QUARTER) if g else QUARTER
        return QUARTER // g

    @property
    def grid_step(self) -> Fraction:
        """Spacing of the exponent grid that carries the series (gcd of exponents)."""
        g = 0
        for e in self.terms():
            g = math.gcd(g, int(e * QUARTER))
        return Fraction(g or QUARTER, QUARTER)

    def slot(self, m: int) -> int:
        """Coefficient at the ``m``-th positive point of the series' grid."""
        return self.coefficient(m * self.grid_step)

    @property
    def valuation(self) -> int:
        """Quarter-slot of the lowest known term; a zero series is zero up to its order."""
        return self.offset if self.coeffs else self.order

    @property
    def order_exponent(self) -> Fraction:
        return Fraction(self.order, QUARTER)

    # arithmetic -------------------------------------------------------------------
    def _expanded(self, offset: int, stride: int, length: int) -> list:
        out = [0] * length
        for i, c in enumerate(self.coeffs):
            pos, r = divmod(self.offset + i * self.stride - offset, stride)
            if r:
                raise AssertionError("grid mismatch")
            if 0 <= pos < length:
                out[pos] = c
        return out

    def __add__(self, other: "QSeries") -> "QSeries":
        order = min(self.order, other.order)
        lo = min(self.offset, other.offset)
        g = math.gcd(math.gcd(self.stride, other.stride), abs(self.offset - other.offset))
        length = max(0, -(-(order - lo) // g))
        a = self._expanded(lo, g, length)
        b = other._expanded(lo, g, length)
        return QSeries(lo, g, [x + y for x, y in zip(a, b)], order)

    def __neg__(self):
        return QSeries(self.offset, self.stride, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return QSeries(self.offset, self.stride, [c * other for c in self.coeffs], self.order)
        order = min(self.order + other.valuation, other.order + self.valuation)
        if not self.coeffs or not other.coeffs:
            return QSeries(0, 1, [], order)
        offset = self.offset + other.offset
        g = math.gcd(self.stride, other.stride)
        length = max(0, -(-(order - offset) // g))
        a = self._expanded(self.offset, g, length)
        b = other._expanded(other.offset, g, length)
        return QSeries(offset, g, _conv(a, b, length), order)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValidationError("negative powers are not supported")
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        if result is None:
            return QSeries(0, 1, [1], self.order - self.offset)
        return result

    def exact_div(self, d: int) -> "QSeries":
        if any(c % d for c in self.coeffs):
            raise ValidationError(f"coefficients are not all divisible by {d}")
        return QSeries(self.offset, self.stride, [c // d for c in self.coeffs], self.order)

    def __eq__(self, other):
        return (
            isinstance(other, QSeries)
            and self.terms() == other.terms()
            and self.order == other.order
        )

    def __repr__(self):
        items = list(self.terms().items())[:6]
        body = " + ".join(f"{c}q^{e}" for e, c in items)
        return f"QSeries({body} + O(q^{self.order_exponent}))"


# theta functions ---------------------------------------------------------------------


def theta3(order) -> QSeries:
    """``sum_{m in Z} q^(m^2)``."""
    terms = {}
    m = 0
    while m * m < order:
        terms[m * m] = 1 if m == 0 else 2
        m += 1
    return QSeries.from_terms(terms, order)


def theta4(order) -> QSeries:
    """``sum_{m in Z} (-q)^(m^2)``."""
    terms = {}
    m = 0
    while m * m < order:
        terms[m * m] = (1 if m == 0 else 2) * (-1) ** (m % 2)
        m += 1
    return QSeries.from_terms(terms, order)


def theta2(order) -> QSeries:
    """``sum_{m in 1/2 + Z} q^(m^2)``."""
    terms = {}
    k = 0
    while Fraction(2 * k + 1, 2) ** 2 < order:
        terms[Fraction(2 * k + 1, 2) ** 2] = 2
        k += 1
    return QSeries.from_terms(terms, order)


def _euler_product(length: int) -> list:
    """Coefficients of ``prod_{m>=1} (1 - x^m)`` below ``x^length`` (pentagonal numbers)."""
    out = [0] * length
    k = 0
    while True:
        hit = False
        for kk in ((k,) if k == 0 else (k, -k)):
            e = kk * (3 * kk - 1) // 2
            if e < length:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return out


def _power_list(a: list, k: int, length: int) -> list:
    result = None
    base = a[:length]
    while k:
        if k & 1:
            result = base if result is None else _conv(result, base, length)
        k >>= 1
        if k:
            base = _conv(base, base, length)
    return result


@lru_cache(maxsize=8)
def _delta_x(length: int) -> tuple:
    """Coefficients of ``prod (1 - x^m)^24`` below ``x^length``."""
    return tuple(_power_list(_euler_product(length), 24, length))


def delta24(order) -> QSeries:
    """``q^2 prod_{m>=1} (1 - q^(2m))^24`` truncated below ``q^order``."""
    length = max(0, math.ceil(Fraction(order) / 2) - 1)
    coeffs = _delta_x(length)
    terms = {2 * (j + 1): c for j, c in enumerate(coeffs)}
    return QSeries.from_terms(terms, order)


def e8_theta(order) -> QSeries:
    """``theta3^8 - (theta2 theta4)^4``, the theta series of E8."""
    return theta3(order) ** 8 - (theta2(order) * theta4(order)) ** 4


def jacobi_thetas(order) -> tuple:
    return theta2(order), theta3(order), theta4(order)


q_form = e8_theta


def kappa_series(n: int, order) -> QSeries:
    """``(theta2 theta4)^4 theta3^n / 16``."""
    return ((theta2(order) * theta4(order)) ** 4).exact_div(16) * theta3(order) ** n


# sequences -------------------------------------------------------------------------------


def tau_values(M: int) -> list:
    """``[tau(1), ..., tau(M)]``."""
    coeffs = _delta_x(M)
    return list(coeffs[:M])


def tau(m: int) -> int:
    if m < 1:
        raise ValidationError("tau is indexed from 1")
    return tau_values(m)[m - 1]


def mu_values(M: int) -> list:
    """``mu(m) = sum_{0<j<m} tau(j) tau(m-j)`` for ``m = 1..M`` (so ``mu(1) = 0``)."""
    t = [0] + tau_values(M)
    sq = _conv(t, t, M + 1)
    return sq[1 : M + 1]


def nu_values(M: int) -> list:
    """Coefficients of ``theta_E8 * delta24`` at ``q^(2m)``, ``m = 1..M``."""
    order = 2 * M + 1
    prod = e8_theta(order) * delta24(order)
    return [prod.coefficient(2 * m) for m in range(1, M + 1)]


def mu(m: int) -> int:
    if m < 2:
        raise ValidationError("mu is indexed from 2")
    return mu_values(m)[m - 1]


def nu(m: int) -> int:
    if m < 1:
        raise ValidationError("nu is indexed from 1")
    return nu_values(m)[m - 1]


def kappa(n: int, m: int) -> int:
    if m < 1:
        raise ValidationError("kappa is indexed from 1")
    return kappa_values(n, m)[m - 1]


def kappa_values(n: int, M: int) -> list:
    if n < 8:
        raise ValidationError("kappa is defined for n >= 8")
    series = kappa_series(n, M + 1)
    return [series.coefficient(m) for m in range(1, M + 1)]


SEQUENCES = {
    "tau": (tau_values, 1),
    "mu": (mu_values, 2),
    "nu": (nu_values, 1),
    "kappa8": (lambda M: kappa_values(8, M), 1),
    "kappa16": (lambda M: kappa_values(16, M), 1),
}


def nonvanishing_scan(sequence, M: int, n: int | None = None):
    """First index ``m <= M`` with a zero term, or None.

    ``sequence`` is a name from :data:`SEQUENCES`, or a callable returning
    the values for ``m = 1..M``.  ``mu`` starts at ``m = 2`` (its first term
    is an empty sum).  ``"kappa"`` needs the dimension ``n``.
    """
    if M < 1:
        raise ValidationError("M must be at least 1")
    if sequence == "kappa":
        if n is None:
            raise ValidationError("kappa needs a dimension n")
        sequence = lambda size: kappa_values(n, size)  # noqa: E731
    if isinstance(sequence, str):
        try:
            fn, first = SEQUENCES[sequence]
        except KeyError:
            raise ValidationError(f"unknown sequence {sequence!r}") from None
    else:
        fn, first = sequence, 1
    values = fn(M)
    for m in range(first, M + 1):
        if values[m - 1] == 0:
            return m
    return None


def harmonic_theta(lattice, P: Poly, order: int) -> QSeries:
    """``sum_{x in lattice} P(x) q^(<x|x>)`` below ``q^order``, for homogeneous harmonic ``P``.

    Exponents are norms, so ``result.coefficient(2 * m)`` is the sum of ``P``
    over the shell of norm ``2m``.
    """
    from .lattices import enumerate_shells

    if P.laplacian():
        raise ValidationError("P is not harmonic")
    if not P.is_homogeneous():
        raise ValidationError("P must be homogeneous")
    if not lattice.even:
        raise ValidationError("the lattice must be even")
    shells = enumerate_shells(lattice, order - 1)
    terms = {}
    if P.degree == 0:
        terms[0] = int(P.terms.get((0,) * P.n, 0))
    den = 1
    for sh in shells.values():
        for v in sh.vectors:
            for x in v:
                den = den * x.denominator // math.gcd(den, x.denominator)
    for m, sh in shells.items():
        if not len(sh):
            continue
        rows = np.array([[int(x * den) for x in v] for v in sh.vectors], dtype=object)
        vals = P.evaluate_integer_rows(rows, scale=den)
        total = sum(vals, Fraction(0))
        if total.denominator != 1:
            raise ValidationError("harmonic theta coefficient is not an integer; scale P")
        terms[m] = int(total)
    return QSeries.from_terms(terms, order)
