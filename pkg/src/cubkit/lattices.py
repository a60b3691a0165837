"""Integral lattices: shells, design strength of shells, Voronoi tests, neighbours.

Bases are stored as rows of exact rationals in ambient coordinates.  Shell
enumeration runs Fincke-Pohst on an LLL-reduced Gram matrix, with floating
bounds widened slightly and every candidate confirmed with integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, ValidationError
from .pointsets import WeightedPointSet
from .surd import Surd
from .verify import StrengthReport, strength_kernel

__all__ = [
    "IntegralLattice",
    "Shell",
    "hnf",
    "lll_reduce",
    "standard",
    "shell",
    "enumerate_shells",
    "shell_design_strength",
    "VoronoiReport",
    "voronoi_tests",
    "solve_lp",
    "two_shell_cubature_e8",
    "neighbor",
    "reflection_image",
    "ReflectionCheck",
    "quadratic_classes",
    "shell_fibers",
    "dumps_lattice",
    "loads_lattice",
]

MAX_VECTORS = int(os.environ.get("CUBKIT_MAX_VECTORS", 2_000_000))


# exact linear algebra ----------------------------------------------------------------


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def hnf(rows) -> list:
    """Row Hermite normal form of an integer matrix, zero rows removed."""
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return [row for row in A[:r]]


def _det(M) -> Fraction:
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return det


def _inverse(M) -> list:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c])
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [a / piv for a in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


def _rank(rows) -> int:
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return 0
    rank, ncol = 0, len(A[0])
    for c in range(ncol):
        p = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[rank], A[p] = A[p], A[rank]
        for i in range(rank + 1, len(A)):
            if A[i][c]:
                f = A[i][c] / A[rank][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def _matmul(A, B):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def lll_reduce(gram, delta=Fraction(3, 4)) -> list:
    """Unimodular integer matrix ``U`` such that ``U G U^T`` is LLL-reduced."""
    G = [[Fraction(x) for x in row] for row in gram]
    n = len(G)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def current():
        Uf = [[Fraction(x) for x in row] for row in U]
        return _matmul(_matmul(Uf, G), list(map(list, zip(*Uf))))

    def gram_schmidt(C):
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = (C[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))) / B[j]
            B[i] = C[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    k = 1
    C = current()
    mu, B = gram_schmidt(C)
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                U[k] = [a - q * b for a, b in zip(U[k], U[j])]
                C = current()
                mu, B = gram_schmidt(C)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            C = current()
            mu, B = gram_schmidt(C)
            k = max(k - 1, 1)
    return U


# lattices ------------------------------------------------------------------------------


class IntegralLattice:
    """Lattice spanned by the rows of ``basis`` (exact rationals, full rank)."""

    def __init__(self, basis, name: str = ""):
        B = tuple(tuple(Fraction(x) for x in row) for row in basis)
        if not B or any(len(r) != len(B) for r in B):
            raise ValidationError("basis must be square and non-empty")
        if _det(B) == 0:
            raise ValidationError("basis vectors are linearly dependent")
        self.basis = B
        self.name = name
        self.gram = tuple(
            tuple(sum((a * b for a, b in zip(u, v)), Fraction(0)) for v in B) for u in B
        )
        self._inverse = None
        self._shells: dict = {}
        self._enumerated_to = -1

    @classmethod
    def from_generators(cls, gens, name: str = "") -> "IntegralLattice":
        gens = [[Fraction(x) for x in g] for g in gens]
        den = _lcm(x.denominator for g in gens for x in g)
        rows = hnf([[int(x * den) for x in g] for g in gens])
        return cls([[Fraction(x, den) for x in r] for r in rows], name)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def determinant(self) -> Fraction:
        return _det(self.gram)

    @property
    def integral(self) -> bool:
        return all(x.denominator == 1 for row in self.gram for x in row)

    @property
    def even(self) -> bool:
        return self.integral and all(self.gram[i][i] % 2 == 0 for i in range(self.dim))

    @property
    def unimodular(self) -> bool:
        return self.integral and abs(self.determinant) == 1

    def flags(self) -> dict:
        return {"integral": self.integral, "even": self.even, "unimodular": self.unimodular}

    def coordinates(self, v) -> list:
        """Coefficients of ``v`` in the basis (exact rationals)."""
        if self._inverse is None:
            self._inverse = _inverse(self.basis)
        v = [Fraction(x) for x in v]
        return [sum((a * b for a, b in zip(v, col)), Fraction(0)) for col in zip(*self._inverse)]

    def contains(self, v) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))

    def vector(self, coeffs) -> tuple:
        return tuple(
            sum((Fraction(c) * b[i] for c, b in zip(coeffs, self.basis)), Fraction(0))
            for i in range(self.dim)
        )

    def inner(self, u, v) -> Fraction:
        return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))

    def hnf_key(self, den: int) -> tuple:
        rows = hnf([[int(x * den) for x in r] for r in self.basis])
        return tuple(tuple(r) for r in rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegralLattice) or other.dim != self.dim:
            return NotImplemented
        den = _lcm(x.denominator for L in (self, other) for r in L.basis for x in r)
        return self.hnf_key(den) == other.hnf_key(den)

    def __hash__(self):
        den = _lcm(x.denominator for r in self.basis for x in r)
        return hash((den, self.hnf_key(den)))

    def __repr__(self):
        return f"<IntegralLattice {self.name or ''} dim={self.dim} det={self.determinant}>"


def standard(name: str, n: int | None = None) -> IntegralLattice:
    """``Z`` (``Z^n``), ``D`` (``D_n``), ``Witt`` (``D_n`` plus the half vector) and ``E8``."""
    key = name.lower()
    if key in ("z", "zn"):
        return IntegralLattice([[int(i == j) for j in range(n)] for i in range(n)], f"Z{n}")
    if key in ("d", "dn"):
        return IntegralLattice.from_generators(_dn_generators(n), f"D{n}")
    if key == "e8":
        key, n = "witt", 8
    if key in ("witt", "gamma"):
        if n is None or n % 4:
            raise ValidationError("Witt lattices need n divisible by 4")
        gens = _dn_generators(n) + [[Fraction(1, 2)] * n]
        return IntegralLattice.from_generators(gens, "E8" if n == 8 else f"Witt{n}")
    raise ValidationError(f"unknown lattice {name!r}")


def _dn_generators(n: int) -> list:
    gens = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        gens.append(v)
    v = [0] * n
    v[0] = v[1] = 1
    gens.append(v)
    return gens


# shells ---------------------------------------------------------------------------------


@dataclass
class Shell:
    norm: int
    vectors: list

    def __len__(self):
        return len(self.vectors)

    def as_pointset(self) -> WeightedPointSet:
        return WeightedPointSet(self.vectors, radius2=self.norm, name=f"shell{self.norm}")


def _fincke_pohst(gram_int, bound: int) -> np.ndarray:
    """All integer vectors ``x`` with ``x G x^T <= bound`` (the zero vector included)."""
    n = len(gram_int)
    G = [[Fraction(x) for x in row] for row in gram_int]
    mu = [[0.0] * n for _ in range(n)]
    d = [0.0] * n
    # G = L D L^T with unit lower L; Q(x) = sum_i d_i (x_i + sum_{j>i} l_ji x_j)^2
    L = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            L[i][j] = (G[i][j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / D[j]
        D[i] = G[i][i] - sum(L[i][k] ** 2 * D[k] for k in range(i))
    for i in range(n):
        d[i] = float(D[i])
        for j in range(i + 1, n):
            mu[i][j] = float(L[j][i])
    eps = 1e-7 * max(1, bound)
    x = [0] * n
    found = []

    def rec(i, remaining):
        center = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / d[i])
        lo, hi = math.ceil(center - r - 1e-9), math.floor(center + r + 1e-9)
        for v in range(lo, hi + 1):
            x[i] = v
            rem = remaining - d[i] * (v - center) ** 2
            if rem < -eps:
                continue
            if i == 0:
                found.append(tuple(x))
                if len(found) > 2 * MAX_VECTORS:
                    raise BudgetExceeded(f"more than {MAX_VECTORS} lattice vectors requested")
            else:
                rec(i - 1, rem)
        x[i] = 0

    rec(n - 1, bound + eps)
    arr = np.array(found, dtype=np.int64).reshape(-1, n)
    return arr


def enumerate_shells(lattice: IntegralLattice, max_norm: int) -> dict:
    """Shells of every norm ``1..max_norm``; results are cached on the lattice."""
    if not lattice.integral:
        raise ValidationError("shell enumeration needs an integral lattice")
    if max_norm > lattice._enumerated_to:
        U = lll_reduce(lattice.gram)
        Uf = [[Fraction(x) for x in row] for row in U]
        red = _matmul(_matmul(Uf, [list(r) for r in lattice.gram]), list(map(list, zip(*Uf))))
        red_int = [[int(x) for x in row] for row in red]
        coeffs = _fincke_pohst(red_int, max_norm)
        Gr = np.array(red_int, dtype=np.int64)
        norms = np.einsum("ij,jk,ik->i", coeffs, Gr, coeffs)
        keep = (norms > 0) & (norms <= max_norm)
        coeffs, norms = coeffs[keep], norms[keep]
        # ambient vectors: coeffs @ U @ basis, kept exact through a common denominator
        den = _lcm(x.denominator for r in lattice.basis for x in r)
        Bint = np.array([[int(x * den) for x in r] for r in lattice.basis], dtype=object)
        UB = np.array(U, dtype=object) @ Bint
        amb = coeffs.astype(object) @ UB
        by_norm: dict = {}
        for row, m in zip(amb.tolist(), norms.tolist()):
            by_norm.setdefault(int(m), []).append(tuple(Fraction(v, den) for v in row))
        shells = {}
        for m in range(1, max_norm + 1):
            vecs = sorted(by_norm.get(m, []))
            shells[m] = Shell(m, vecs)
        lattice._shells = shells
        lattice._enumerated_to = max_norm
    return {m: lattice._shells[m] for m in range(1, max_norm + 1)}


def shell(lattice: IntegralLattice, m: int) -> Shell:
    if m < 1:
        raise ValidationError("shell norm must be positive")
    return enumerate_shells(lattice, m)[m]


def shell_design_strength(lattice: IntegralLattice, m: int, k_max: int) -> StrengthReport:
    """Exact design strength of the shell of norm ``m`` (uniform weights)."""
    sh = shell(lattice, m)
    if not len(sh):
        raise ValidationError(f"shell of norm {m} is empty")
    return strength_kernel(sh.as_pointset(), k_max)


# linear programming -------------------------------------------------------------------------


def solve_lp(A, b, c):
    """Minimize ``c x`` subject to ``A x = b``, ``x >= 0``, in exact arithmetic.

    Two-phase tableau simplex with Bland's rule.  Returns ``(status, x, value)``
    where status is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.
    """
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    m, n = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # columns: x (n), artificial (m), rhs; the last row holds reduced costs
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]

    def pivot(r, col):
        pv = T[r][col]
        T[r] = [v / pv for v in T[r]]
        for i in range(len(T)):
            if i != r and T[i][col]:
                f = T[i][col]
                T[i] = [a - f * bb for a, bb in zip(T[i], T[r])]
        basis[r] = col

    def run(allowed):
        rows = len(T) - 1
        while True:
            cost = T[-1]
            entering = next((j for j in allowed if cost[j] < 0), None)
            if entering is None:
                return "optimal"
            best = None
            for i in range(rows):
                if T[i][entering] > 0:
                    ratio = T[i][-1] / T[i][entering]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], entering)

    # phase one: minimize the sum of artificials
    cost = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            cost[j] -= T[i][j]
        cost[-1] -= T[i][-1]
    T.append(cost)
    run(list(range(n + m)))
    if T[-1][-1] < 0:
        return "infeasible", None, None
    T.pop()
    # drive artificial variables out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            pivot(i, col)
        i += 1
    T[:] = [row[:n] + [row[-1]] for row in T]
    obj = list(c) + [Fraction(0)]
    for i, j in enumerate(basis):
        if obj[j]:
            f = obj[j]
            obj = [a - f * bb for a, bb in zip(obj, T[i])]
    T.append(obj)
    status = run(list(range(n)))
    if status == "unbounded":
        return "unbounded", None, None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    return "optimal", x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))


# Voronoi ---------------------------------------------------------------------------------


@dataclass
class VoronoiReport:
    min_norm: int
    kissing: int
    perfect: bool
    eutactic: bool
    strongly_perfect: bool

    @property
    def extreme(self) -> bool:
        return self.perfect and self.eutactic


def _min_shell(lattice: IntegralLattice) -> Shell:
    m = 1
    while True:
        sh = shell(lattice, m)
        if len(sh):
            return sh
        m += 1


def _sym_entries(v):
    n = len(v)
    return [v[i] * v[j] for i in range(n) for j in range(i, n)]


def _eutactic(entries, n) -> bool:
    identity = [Fraction(int(i == j)) for i in range(n) for j in range(i, n)]
    total = [sum(col) for col in zip(*entries)]
    # equal weights already certify eutaxy when the sum is a multiple of I
    if total[0] > 0 and all(t == total[0] * e for t, e in zip(total, identity)):
        return True
    # sum_p (s + v_p) A_p = I with s, v >= 0; eutactic iff max s > 0
    A = [[total[r]] + [e[r] for e in entries] for r in range(len(identity))]
    c = [Fraction(-1)] + [Fraction(0)] * len(entries)
    status, x, _ = solve_lp(A, identity, c)
    return status == "unbounded" or (status == "optimal" and x[0] > 0)


def voronoi_tests(lattice: IntegralLattice) -> VoronoiReport:
    """Perfection, eutaxy and strong perfection of the minimal shell.

    Eutaxy asks for strictly positive weights on the minimal vectors giving a
    cubature formula of strength 3; by symmetry it suffices to weight
    ``+-`` pairs equally, and the odd conditions then hold automatically.
    """
    sh = _min_shell(lattice)
    n = lattice.dim
    pairs = [v for v in sh.vectors if next(x for x in v if x != 0) > 0]
    entries = [_sym_entries(v) for v in pairs]
    perfect = _rank(entries) == n * (n + 1) // 2
    eutactic = _eutactic(entries, n)
    strongly = strength_kernel(sh.as_pointset(), 5).max_strength >= 5
    return VoronoiReport(sh.norm, len(sh), perfect, eutactic, strongly)


# E8 two-shell formula ------------------------------------------------------------------------


def two_shell_cubature_e8() -> WeightedPointSet:
    """Norm-2 and norm-4 vectors of E8 scaled to the unit sphere.

    Weights are ``1/1680`` on the first shell and ``1/2520`` on the second;
    the formula has strength 11.
    """
    E8 = standard("E8")
    s2, s4 = shell(E8, 2), shell(E8, 4)
    inv_root2 = Surd.sqrt(Fraction(1, 2))
    pts = [tuple(inv_root2 * x for x in v) for v in s2.vectors]
    pts += [tuple(Surd(x / 2) for x in v) for v in s4.vectors]
    weights = [Fraction(1, 1680)] * len(s2) + [Fraction(1, 2520)] * len(s4)
    return WeightedPointSet(pts, weights, radius2=1, name="e8_two_shell_s7")


# neighbours --------------------------------------------------------------------------------------


def neighbor(M: IntegralLattice, z) -> IntegralLattice:
    """``M_z`` plus ``z/2 + M_z``, where ``M_z = {m in M : <m|z> even}``."""
    if not (M.even and M.unimodular):
        raise ValidationError("neighbours are built from even unimodular lattices")
    z = tuple(Fraction(x) for x in z)
    coords = M.coordinates(z)
    if any(c.denominator != 1 for c in coords):
        raise ValidationError("z is not in the lattice")
    if all(int(c) % 2 == 0 for c in coords):
        raise ValidationError("z lies in 2M")
    norm = M.inner(z, z)
    if norm % 4:
        raise ValidationError("<z|z> must be divisible by 4")
    g = [int(M.inner(b, z)) for b in M.basis]
    pivot = next(i for i, v in enumerate(g) if v % 2)
    gens = []
    for i, b in enumerate(M.basis):
        if i == pivot:
            gens.append([2 * x for x in b])
        elif g[i] % 2:
            gens.append([x - y for x, y in zip(b, M.basis[pivot])])
        else:
            gens.append(list(b))
    gens.append([x / 2 for x in z])
    return IntegralLattice.from_generators(gens, name="neighbor")


@dataclass
class ReflectionCheck:
    x: tuple
    root: tuple
    z: tuple
    image: IntegralLattice
    neighbour: IntegralLattice

    @property
    def equal(self) -> bool:
        return self.image == self.neighbour


def reflection_image(M: IntegralLattice, x) -> ReflectionCheck:
    """``s_x(M)`` for ``<x|x> = 4``, together with the neighbour ``M^z`` for ``z = x - 2r``.

    ``r`` is the first root (in shell order) with ``<r|x> = 1``.
    """
    x = tuple(Fraction(v) for v in x)
    if M.inner(x, x) != 4 or not M.contains(x):
        raise ValidationError("x must be a lattice vector of norm 4")
    root = next((r for r in shell(M, 2).vectors if M.inner(r, x) == 1), None)
    if root is None:
        raise ValidationError("no root with <r|x> = 1")
    z = tuple(a - 2 * b for a, b in zip(x, root))

    def reflect(y):
        f = M.inner(x, y) / 2
        return [a - f * b for a, b in zip(y, x)]

    image = IntegralLattice([reflect(b) for b in M.basis], name="reflected")
    return ReflectionCheck(x, root, z, image, neighbor(M, z))


def quadratic_classes(M: IntegralLattice) -> Counter:
    """Classes of ``M/2M`` by ``q(z) = <z|z>/2 mod 2``: zero, isotropic, anisotropic."""
    if not M.even:
        raise ValidationError("quadratic classes need an even lattice")
    G = [[int(x) for x in row] for row in M.gram]
    counts: Counter = Counter()
    for c in itertools.product((0, 1), repeat=M.dim):
        if not any(c):
            counts["zero"] += 1
            continue
        q = sum(c[i] * c[j] * G[i][j] for i in range(M.dim) for j in range(M.dim)) // 2
        counts["isotropic" if q % 2 == 0 else "anisotropic"] += 1
    return counts


def shell_fibers(M: IntegralLattice, m: int) -> Counter:
    """Number of norm-``m`` vectors in each class of ``M/2M``."""
    fib: Counter = Counter()
    for v in shell(M, m).vectors:
        key = tuple(int(c) % 2 for c in M.coordinates(v))
        fib[key] += 1
    return fib


# text block format ----------------------------------------------------------------------------


def dumps_lattice(L: IntegralLattice) -> str:
    """``lattice`` header, ``basis`` rows, then the ``gram`` rows (checked on load)."""
    lines = [f"lattice name={L.name or 'unnamed'} dim={L.dim}", "basis"]
    lines += [" ".join(str(x) for x in row) for row in L.basis]
    lines.append("gram")
    lines += [" ".join(str(x) for x in row) for row in L.gram]
    return "\n".join(lines) + "\n"


def loads_lattice(text: str) -> IntegralLattice:
    header, section = None, None
    blocks = {"basis": [], "gram": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            fields = line.split()
            if fields[0] != "lattice":
                raise ValidationError(f"line {lineno}: missing 'lattice' header")
            header = dict(f.partition("=")[::2] for f in fields[1:])
            continue
        if line in blocks:
            section = line
            continue
        if section is None:
            raise ValidationError(f"line {lineno}: row outside a 'basis' or 'gram' block")
        try:
            blocks[section].append([Fraction(t) for t in line.split()])
        except ValueError:
            raise ValidationError(f"line {lineno}: bad rational token") from None
    if header is None:
        raise ValidationError("empty lattice file")
    if not blocks["basis"]:
        raise ValidationError("lattice file needs a 'basis' block")
    L = IntegralLattice(blocks["basis"], header.get("name", ""))
    if "dim" in header and int(header["dim"]) != L.dim:
        raise ValidationError("dim header disagrees with the basis")
    if blocks["gram"] and tuple(tuple(r) for r in blocks["gram"]) != L.gram:
        raise ValidationError("gram block disagrees with the basis")
    return L
