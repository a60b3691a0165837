"""Polynomial spaces on spheres: reproducing kernels, dimensions, moments.

Kernels are univariate polynomials in ``t = <x|y>/rho**2`` with exact
rational coefficients.  ``gegenbauer_q(n, k)`` reproduces the harmonic
polynomials of degree ``k`` on the sphere in ``R^n`` (normalized so that
``Q(1)`` is the dimension of that space), ``kernel_c`` sums every second
one and reproduces homogeneous polynomials, ``kernel_r`` sums all of them
and reproduces polynomials of degree at most ``k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "KernelPolynomial",
    "gegenbauer_q",
    "kernel_c",
    "kernel_r",
    "gegenbauer_values",
    "dim_harmonic",
    "dim_homogeneous",
    "dim_restricted",
    "moment_constant",
    "gaussian_moment",
    "monomial_sphere_integral",
    "monomials",
    "multinomial",
    "QuadratureRule",
    "gauss_rule",
    "newton_cotes_rule",
    "Poly",
    "zonal_harmonic",
]


class KernelPolynomial:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = [Fraction(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c) if c else (Fraction(0),)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if any(self.coeffs) else -1

    def __call__(self, t):
        """Horner evaluation; works for Fractions, Surds, floats and arrays."""
        if isinstance(t, np.ndarray) or isinstance(t, float):
            acc = np.zeros_like(t, dtype=float) if isinstance(t, np.ndarray) else 0.0
            for c in reversed(self.coeffs):
                acc = acc * t + float(c)
            return acc
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other: "KernelPolynomial") -> "KernelPolynomial":
        m = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (m - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (m - len(other.coeffs))
        return KernelPolynomial([x + y for x, y in zip(a, b)])

    def __eq__(self, other):
        return isinstance(other, KernelPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def scale(self, s) -> "KernelPolynomial":
        return KernelPolynomial([c * Fraction(s) for c in self.coeffs])

    def shift_mul_t(self) -> "KernelPolynomial":
        return KernelPolynomial((Fraction(0),) + self.coeffs)

    def derivative(self) -> "KernelPolynomial":
        return KernelPolynomial([i * c for i, c in enumerate(self.coeffs)][1:] or [0])

    def roots(self) -> np.ndarray:
        """Real roots in ascending order, polished by Newton steps."""
        if self.degree < 1:
            return np.zeros(0)
        raw = np.roots([float(c) for c in reversed(self.coeffs)])
        real = np.sort(raw[np.abs(raw.imag) < 1e-7].real)
        d = self.derivative()
        for _ in range(4):
            step = self(real) / d(real)
            real = real - step
        return np.sort(real)

    def __repr__(self):
        return f"KernelPolynomial({[str(c) for c in self.coeffs]})"


@lru_cache(maxsize=None)
def gegenbauer_q(n: int, k: int) -> KernelPolynomial:
    """Zonal kernel of harmonic polynomials of degree ``k`` on ``S^(n-1)``.

    Uses the three-term recurrence from ``k = 1`` upward.  For ``n = 2`` the
    recurrence degenerates and the kernel is ``2*T_k`` (Chebyshev).
    """
    if n < 2:
        raise ValueError("gegenbauer_q needs n >= 2")
    if k < 0:
        raise ValueError("degree must be non-negative")
    if k == 0:
        return KernelPolynomial([1])
    if n == 2:
        # T_{k+1} = 2t T_k - T_{k-1}
        prev, cur = KernelPolynomial([1]), KernelPolynomial([0, 1])
        for _ in range(k - 1):
            prev, cur = cur, cur.shift_mul_t().scale(2) + prev.scale(-1)
        return cur.scale(2)
    prev, cur = KernelPolynomial([1]), KernelPolynomial([0, n])
    for j in range(1, k):
        lead = Fraction(n + 2 * j, j + 1)
        back = Fraction(n + j - 3, n + 2 * j - 4)
        prev, cur = cur, (cur.shift_mul_t() + prev.scale(-back)).scale(lead)
    return cur


def gegenbauer_values(n: int, k_max: int, t: np.ndarray) -> list:
    """Float values ``[Q^(0)(t), ..., Q^(k_max)(t)]`` by the stable recurrence."""
    t = np.asarray(t, dtype=float)
    out = [np.ones_like(t)]
    if k_max == 0:
        return out
    if n == 2:
        prev, cur = np.ones_like(t), t.copy()
        out.append(2 * cur)
        for _ in range(k_max - 1):
            prev, cur = cur, 2 * t * cur - prev
            out.append(2 * cur)
        return out
    out.append(n * t)
    for j in range(1, k_max):
        lead = (n + 2 * j) / (j + 1)
        back = (n + j - 3) / (n + 2 * j - 4)
        out.append(lead * (t * out[j] - back * out[j - 1]))
    return out


@lru_cache(maxsize=None)
def kernel_c(n: int, k: int) -> KernelPolynomial:
    """Kernel of ``P^(k)`` restricted to the sphere: ``sum_j Q^(k-2j)``."""
    acc = KernelPolynomial([0])
    for j in range(k % 2, k + 1, 2):
        acc = acc + gegenbauer_q(n, j)
    return acc


@lru_cache(maxsize=None)
def kernel_r(n: int, k: int) -> KernelPolynomial:
    """Kernel of ``F^(k)``, polynomials of degree at most ``k`` on the sphere."""
    acc = KernelPolynomial([0])
    for j in range(k + 1):
        acc = acc + gegenbauer_q(n, j)
    return acc


def _binom(a: int, b: int) -> int:
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


def dim_homogeneous(n: int, k: int) -> int:
    return _binom(n + k - 1, n - 1)


def dim_harmonic(n: int, k: int) -> int:
    return _binom(n + k - 1, n - 1) - _binom(n + k - 3, n - 1)


def dim_restricted(n: int, k: int) -> int:
    """Dimension of ``F^(k)(S^(n-1))``."""
    return _binom(n + k - 1, n - 1) + _binom(n + k - 2, n - 1)


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def moment_constant(n: int, l: int) -> Fraction:
    """``c_2l``: average of ``<x|u>**(2l)`` over the unit sphere, for ``|u| = 1``."""
    den = 1
    for i in range(l):
        den *= n + 2 * i
    return Fraction(_double_factorial(2 * l - 1), den)


def gaussian_moment(l: int) -> Fraction:
    """``E[g**(2l)]`` for ``g`` with density ``exp(-t**2)/sqrt(pi)``."""
    return Fraction(_double_factorial(2 * l - 1), 2**l)


def monomial_sphere_integral(n: int, exponents) -> Fraction:
    """Average of ``x**exponents`` over the unit sphere in ``R^n``."""
    a = tuple(exponents)
    if len(a) != n:
        raise ValueError("exponent length must equal n")
    if any(e % 2 for e in a):
        return Fraction(0)
    num = 1
    for e in a:
        num *= _double_factorial(e - 1)
    den = 1
    for i in range(sum(a) // 2):
        den *= n + 2 * i
    return Fraction(num, den)


def monomials(n: int, d: int):
    """Exponent tuples of degree ``d`` in ``n`` variables, lexicographically descending."""
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        yield tuple(e)


def multinomial(exponents) -> int:
    out = math.factorial(sum(exponents))
    for e in exponents:
        out //= math.factorial(e)
    return out


@dataclass(frozen=True)
class QuadratureRule:
    nodes: tuple
    weights: tuple
    interval: tuple
    exact_degree: int

    @property
    def positive(self) -> bool:
        return all(w > 0 for w in self.weights)

    def integrate(self, f):
        return sum(w * f(x) for x, w in zip(self.nodes, self.weights))


def _legendre_and_derivative(l: int, x: float) -> tuple[float, float]:
    p0, p1 = 1.0, x
    for j in range(2, l + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = l * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_rule(l: int, a: float = -1.0, b: float = 1.0) -> QuadratureRule:
    """``l``-point Gauss-Legendre rule on ``[a, b]``, exact to degree ``2l - 1``."""
    if l < 1:
        raise ValueError("need at least one node")
    if l == 1:
        nodes, weights = [0.0], [2.0]
    else:
        nodes, weights = [], []
        for i in range(1, l + 1):
            x = math.cos(math.pi * (i - 0.25) / (l + 0.5))
            for _ in range(100):
                p, dp = _legendre_and_derivative(l, x)
                dx = p / dp
                x -= dx
                if abs(dx) < 1e-16:
                    break
            _, dp = _legendre_and_derivative(l, x)
            nodes.append(x)
            weights.append(2.0 / ((1.0 - x * x) * dp * dp))
        nodes.reverse()
        weights.reverse()
    half, mid = (b - a) / 2.0, (a + b) / 2.0
    return QuadratureRule(
        nodes=tuple(half * x + mid for x in nodes),
        weights=tuple(half * w for w in weights),
        interval=(a, b),
        exact_degree=2 * l - 1,
    )


def _poly_mul(p: list, q: list) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def newton_cotes_rule(l: int, a=0, b=1) -> QuadratureRule:
    """Closed ``l``-point Newton-Cotes rule with exact rational weights."""
    if l < 2:
        raise ValueError("closed Newton-Cotes needs l >= 2")
    a, b = Fraction(a), Fraction(b)
    m = l - 1
    weights = []
    for j in range(l):
        basis = [Fraction(1)]
        for i in range(l):
            if i != j:
                basis = _poly_mul(basis, [Fraction(-i, j - i), Fraction(1, j - i)])
        integral = sum(c * Fraction(m ** (p + 1), p + 1) for p, c in enumerate(basis))
        weights.append(integral * (b - a) / m)
    nodes = tuple(a + (b - a) * Fraction(j, m) for j in range(l))
    return QuadratureRule(
        nodes=nodes,
        weights=tuple(weights),
        interval=(a, b),
        exact_degree=m if m % 2 else m + 1,
    )


class Poly:
    """Multivariate polynomial with rational coefficients.

    ``terms`` maps exponent tuples of length ``n`` to nonzero Fractions.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                if len(e) != n:
                    raise ValueError("exponent length must equal n")
                self.terms[tuple(e)] = c

    @classmethod
    def const(cls, n: int, c) -> "Poly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, i: int) -> "Poly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs) -> "Poly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    @classmethod
    def norm_squared(cls, n: int) -> "Poly":
        return cls(n, {tuple(2 if j == i else 0 for j in range(n)): 1 for i in range(n)})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError("mismatched variable counts")
            return other
        return Poly.const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly(self.n, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result, base = Poly.const(self.n, 1), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        return self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def derivative(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Poly(self.n, out)

    def laplacian(self) -> "Poly":
        out: dict = {}
        for e, c in self.terms.items():
            for i in range(self.n):
                if e[i] >= 2:
                    f = list(e)
                    f[i] -= 2
                    f = tuple(f)
                    out[f] = out.get(f, 0) + c * e[i] * (e[i] - 1)
        return Poly(self.n, out)

    def __call__(self, point):
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def sphere_average(self) -> Fraction:
        return sum(
            (c * monomial_sphere_integral(self.n, e) for e, c in self.terms.items()),
            Fraction(0),
        )

    def evaluate_integer_rows(self, rows: np.ndarray, scale: int = 1):
        """Exact values at ``rows / scale`` for an integer matrix ``rows``.

        Returns a list of Fractions.  Uses int64 when the magnitude bound
        allows it and Python integers otherwise.
        """
        rows = np.asarray(rows)
        if not self.terms:
            return [Fraction(0)] * len(rows)
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        deg = self.degree
        ints = {e: int(c * den) * scale ** (deg - sum(e)) for e, c in self.terms.items()}
        bound = int(np.abs(rows).max(initial=0)) ** deg * sum(abs(v) for v in ints.values())
        dtype = np.int64 if bound < 2**62 else object
        mat = rows.astype(dtype)
        acc = np.zeros(len(rows), dtype=dtype)
        for e, v in ints.items():
            col = np.full(len(rows), v, dtype=dtype)
            for i, k in enumerate(e):
                for _ in range(k):
                    col = col * mat[:, i]
            acc = acc + col
        full = den * scale**deg
        return [Fraction(int(x), full) for x in acc]

    def __repr__(self):
        return f"Poly(n={self.n}, terms={len(self.terms)}, degree={self.degree})"


def zonal_harmonic(axis, k: int) -> Poly:
    """Homogeneous harmonic polynomial ``x -> |a|^k |x|^k Q^(k)(<a|x>/(|a||x|))``."""
    n = len(axis)
    q = gegenbauer_q(n, k)
    inner = Poly.linear([Fraction(a) for a in axis])
    a2 = sum(Fraction(a) ** 2 for a in axis)
    r2 = Poly.norm_squared(n)
    out = Poly(n)
    for power, c in enumerate(q.coeffs):
        if c:
            j = (k - power) // 2
            out = out + inner**power * (r2**j) * (c * a2**j)
    return out
