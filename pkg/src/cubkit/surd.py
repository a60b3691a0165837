"""Exact arithmetic in multi-quadratic number fields.

A :class:`Surd` is a finite sum ``sum_d c_d * sqrt(d)`` with rational
coefficients ``c_d`` and distinct squarefree positive integers ``d``.
Square roots of distinct squarefree integers are linearly independent over
the rationals, so an element is zero exactly when every coefficient is zero.
Products stay in the same representation because
``sqrt(a) * sqrt(b) = g * sqrt(a*b/g**2)`` with ``g = gcd(a, b)``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath

__all__ = ["Surd", "squarefree_split", "as_surd"]


@lru_cache(maxsize=4096)
def squarefree_split(m: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``m == s*s*d`` and ``d`` squarefree."""
    if m <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    s, d = 1, 1
    rest = m
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    d *= rest
    return s, d


@lru_cache(maxsize=4096)
def _prime_factors(d: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            out.append(p)
            while d % p == 0:
                d //= p
        p += 1 if p == 2 else 2
    if d > 1:
        out.append(d)
    return tuple(out)


class Surd:
    """Element of a multi-quadratic extension of the rationals.

    Instances are immutable and hashable; a rational-valued Surd hashes like
    the equal :class:`fractions.Fraction`, so both can share dictionary keys.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, value=0):
        if isinstance(value, Surd):
            self._terms = value._terms
        elif isinstance(value, (int, Fraction, Rational)):
            v = Fraction(value)
            self._terms = ((1, v),) if v else ()
        else:
            raise TypeError(f"cannot build a Surd from {type(value).__name__}")
        self._hash = None

    @classmethod
    def _from_dict(cls, terms: dict) -> "Surd":
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted((d, c) for d, c in terms.items() if c))
        obj._hash = None
        return obj

    @classmethod
    def sqrt(cls, q) -> "Surd":
        """Exact square root of a non-negative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        if q == 0:
            return cls(0)
        # sqrt(p/r) = sqrt(p*r)/r
        s, d = squarefree_split(q.numerator * q.denominator)
        return cls._from_dict({d: Fraction(s, q.denominator)})

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    def radicals(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self._terms)

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms[0][1] if self._terms else Fraction(0)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for d, c in other._terms:
            acc[d] = acc.get(d, 0) + c
        return Surd._from_dict(acc)

    __radd__ = __add__

    def __neg__(self):
        return Surd._from_dict({d: -c for d, c in self._terms})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Surd(0)
            return Surd._from_dict({d: c * other for d, c in self._terms})
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for d1, c1 in self._terms:
            for d2, c2 in other._terms:
                if d1 == 1 or d2 == 1:
                    d, g = d1 * d2, 1
                else:
                    g = math.gcd(d1, d2)
                    d = (d1 // g) * (d2 // g)
                acc[d] = acc.get(d, 0) + c1 * c2 * g
        return Surd._from_dict(acc)

    __rmul__ = __mul__

    def conjugate(self, p: int) -> "Surd":
        """Image under the field automorphism ``sqrt(p) -> -sqrt(p)``."""
        return Surd._from_dict({d: (-c if d % p == 0 else c) for d, c in self._terms})

    def inverse(self) -> "Surd":
        if not self._terms:
            raise ZeroDivisionError("Surd division by zero")
        primes = sorted({p for d, _ in self._terms for p in _prime_factors(d)})
        num = Surd(1)
        cur = self
        for p in primes:
            conj = cur.conjugate(p)
            num = num * conj
            cur = cur * conj
        return num * (1 / cur.to_fraction())

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("Surd division by zero")
            return Surd._from_dict({d: c / other for d, c in self._terms})
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = Surd(1), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # comparison -----------------------------------------------------------
    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = as_surd(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.to_fraction())
            else:
                self._hash = hash(self._terms)
        return self._hash

    def sign(self) -> int:
        if not self._terms:
            return 0
        if self.is_rational():
            return 1 if self._terms[0][1] > 0 else -1
        approx = float(self)
        scale = sum(abs(float(c)) * math.sqrt(d) for d, c in self._terms)
        if abs(approx) > 1e-9 * scale:
            return 1 if approx > 0 else -1
        # nonzero by independence of the radicals; refine until the sign shows
        for dps in (60, 200, 800):
            with mpmath.workdps(dps):
                val = mpmath.fsum(
                    mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(d)
                    for d, c in self._terms
                )
                if abs(val) > mpmath.mpf(10) ** (-(dps - 10)) * scale:
                    return 1 if val > 0 else -1
        raise ArithmeticError("sign undecided at 800 digits")

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return math.fsum(
            (c.numerator / c.denominator) * math.sqrt(d) for d, c in self._terms
        )

    # text -----------------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for d, c in self._terms:
            mag = abs(c)
            if d == 1:
                body = str(mag)
            elif mag == 1:
                body = f"sqrt({d})"
            else:
                body = f"{mag}*sqrt({d})"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return f"Surd('{self}')"

    _TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?(?:sqrt\((\d+)\))?$")

    @classmethod
    def parse(cls, text: str) -> "Surd":
        """Parse the textual form produced by ``str``, e.g. ``1/2-3*sqrt(5)``."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty Surd literal")
        pieces = re.findall(r"[+-]?[^+-]+", s)
        if "".join(pieces) != s:
            raise ValueError(f"malformed Surd literal {text!r}")
        total = cls(0)
        for piece in pieces:
            neg = piece.startswith("-")
            body = piece.lstrip("+-")
            m = cls._TERM.match(body)
            if not m or not body or body.endswith("*"):
                raise ValueError(f"malformed Surd term {piece!r}")
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            term = cls.sqrt(int(m.group(2))) * coef if m.group(2) else cls(coef)
            total = total - term if neg else total + term
        return total


def as_surd(x):
    """Coerce ints, Fractions and Surds; ``NotImplemented`` for anything else."""
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)):
        return Surd(x)
    return NotImplemented
