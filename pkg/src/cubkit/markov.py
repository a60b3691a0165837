"""Markov operators ``sum_s W(s) pi^(k)(s)`` on spherical harmonics of degree ``k`` on S^2.

The harmonic basis is the real solid-harmonic basis ordered
``[m=0, cos 1, sin 1, cos 2, sin 2, ...]`` and orthonormal for the
normalised surface measure.  ``pi(g)`` acts by ``phi -> phi o g^-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, ValidationError
from .pointsets import WeightedPointSet
from .polyspaces import Poly, gauss_rule, gegenbauer_q
from .verify import StrengthReport, strength_kernel

__all__ = [
    "HarmonicBasisK",
    "harmonic_basis",
    "harmonic_values",
    "OperatorMatrix",
    "rep_matrix",
    "trace_formula",
    "rotation_angle",
    "markov_operator",
    "jacobi_eigh",
    "spectrum",
    "operator_norm",
    "reflection",
    "reflections_of",
    "homothety_report",
    "cubature_homothety_check",
    "homothety_implies_design",
    "KestenReport",
    "kesten_moments",
    "kesten_bound",
    "lps_reference_bound",
    "SandwichReport",
    "norm_sandwich",
    "WORD_CAP",
    "dumps_matrices",
    "loads_matrices",
]

ORTHO_TOL = 1e-12
WORD_CAP = 10**12


# exact harmonic basis --------------------------------------------------------------------


def _legendre_derivative_coeffs(l: int, m: int) -> list:
    """Coefficients of the ``m``-th derivative of the Legendre polynomial ``P_l``."""
    q = gegenbauer_q(3, l)
    coeffs = [Fraction(c) / (2 * l + 1) for c in q.coeffs]
    for _ in range(m):
        coeffs = [i * c for i, c in enumerate(coeffs)][1:]
    return coeffs


def _re_im_power(m: int) -> tuple:
    """``Re (x + iy)^m`` and ``Im (x + iy)^m`` as polynomials in three variables."""
    re, im = Poly(3), Poly(3)
    for a in range(m + 1):
        c = math.comb(m, a)
        mono = (m - a, a, 0)
        r = a % 4
        if r == 0:
            re = re + Poly(3, {mono: c})
        elif r == 1:
            im = im + Poly(3, {mono: c})
        elif r == 2:
            re = re + Poly(3, {mono: -c})
        else:
            im = im + Poly(3, {mono: -c})
    return re, im


def _associated_factor(l: int, m: int) -> Poly:
    """``r^(l-m) P_l^(m)(z / r)`` as a polynomial (only even powers of ``r`` occur)."""
    coeffs = _legendre_derivative_coeffs(l, m)
    r2 = Poly.norm_squared(3)
    z = Poly.var(3, 2)
    out = Poly(3)
    for j, c in enumerate(coeffs):
        if c:
            out = out + (z**j) * (r2 ** ((l - m - j) // 2)) * c
    return out


@dataclass
class HarmonicBasisK:
    """Exact orthogonal basis of H^(k)(R^3) with its normalisation.

    ``polys[j] / sqrt(norms2[j])`` is orthonormal; ``basis`` holds those
    orthonormal elements as float coefficient vectors over ``monomials``.
    """

    degree: int
    polys: list
    norms2: list
    monomials: list
    basis: np.ndarray
    gram_factor: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.polys)

    def orthonormality_defect(self) -> float:
        worst = 0.0
        for i, p in enumerate(self.polys):
            for j in range(i, len(self.polys)):
                val = (p * self.polys[j]).sphere_average()
                val = float(val) * self.gram_factor[i] * self.gram_factor[j]
                worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
        return worst

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cols = [np.array([float(p(tuple(x))) for x in pts]) * f for p, f in zip(self.polys, self.gram_factor)]
        return np.stack(cols, axis=1)


@lru_cache(maxsize=64)
def harmonic_basis(k: int) -> HarmonicBasisK:
    if k < 0:
        raise ValidationError("degree must be nonnegative")
    polys = [_associated_factor(k, 0)]
    for m in range(1, k + 1):
        re, im = _re_im_power(m)
        fac = _associated_factor(k, m)
        polys += [re * fac, im * fac]
    norms2 = [(p * p).sphere_average() for p in polys]
    monos = sorted({e for p in polys for e in p.terms}, reverse=True)
    index = {e: i for i, e in enumerate(monos)}
    gram_factor = np.array([1.0 / math.sqrt(float(v)) for v in norms2])
    basis = np.zeros((len(monos), len(polys)))
    for j, p in enumerate(polys):
        for e, c in p.terms.items():
            basis[index[e], j] = float(c) * gram_factor[j]
    return HarmonicBasisK(k, polys, norms2, monos, basis, gram_factor)


def harmonic_values(k: int, points) -> np.ndarray:
    """Orthonormal degree-``k`` harmonics at unit vectors, shape ``(N, 2k+1)``.

    Fully normalised associated Legendre recurrences; agrees with
    :func:`harmonic_basis` but stays stable for large ``k``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], np.clip(pts[:, 2], -1.0, 1.0)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.arctan2(y, x)
    out = np.empty((len(pts), 2 * k + 1))
    pmm = np.ones_like(z)
    for m in range(0, k + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2 * m + 1) / (2 * m)) * s
        if m == k:
            plm = pmm
        else:
            p_prev, p_cur = pmm, math.sqrt(2 * m + 3) * z * pmm
            for l in range(m + 2, k + 1):
                a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
                b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
                p_prev, p_cur = p_cur, a * (z * p_cur - b * p_prev)
            plm = p_cur
        if m == 0:
            out[:, 0] = plm
        else:
            out[:, 2 * m - 1] = math.sqrt(2.0) * plm * np.cos(m * phi)
            out[:, 2 * m] = math.sqrt(2.0) * plm * np.sin(m * phi)
    return out


@lru_cache(maxsize=64)
def _sphere_cubature(k: int) -> tuple:
    """Product rule on S^2 exact for polynomials of degree ``2k``."""
    g = gauss_rule(k + 1)
    zs = np.array(g.nodes)
    wz = np.array(g.weights) / 2.0
    nphi = 2 * k + 1
    phis = 2 * math.pi * np.arange(nphi) / nphi
    Z, P = np.meshgrid(zs, phis, indexing="ij")
    W = np.repeat(wz, nphi) / nphi
    S = np.sqrt(1.0 - Z.ravel() ** 2)
    pts = np.stack([S * np.cos(P.ravel()), S * np.sin(P.ravel()), Z.ravel()], axis=1)
    return pts, W, harmonic_values(k, pts)


# operators -------------------------------------------------------------------------------


@dataclass
class OperatorMatrix:
    degree: int
    matrix: np.ndarray
    symmetric: bool

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


def _check_orthogonal(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (3, 3):
        raise ValidationError("expected a 3x3 matrix")
    if np.max(np.abs(g.T @ g - np.eye(3))) > ORTHO_TOL * 10:
        raise ValidationError("matrix is not orthogonal")
    return g


def _is_symmetric(a: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= tol)


def rep_matrix(g, k: int) -> OperatorMatrix:
    """Matrix of ``phi -> phi o g^-1`` on the orthonormal degree-``k`` basis."""
    g = _check_orthogonal(g)
    pts, w, vals = _sphere_cubature(k)
    moved = harmonic_values(k, pts @ g)  # rows are g^-1 x = g^T x
    mat = vals.T @ (w[:, None] * moved)
    return OperatorMatrix(k, mat, _is_symmetric(mat))


def rotation_angle(g) -> tuple:
    """``(det, theta)``: for det -1 the angle of ``-g`` composed with a reflection."""
    g = _check_orthogonal(g)
    det = 1 if np.linalg.det(g) > 0 else -1
    tr = float(np.trace(g))
    c = (tr - 1.0) / 2.0 if det > 0 else (tr + 1.0) / 2.0
    return det, math.acos(min(1.0, max(-1.0, c)))


def trace_formula(g, k: int) -> float:
    """Character of ``pi^(k)`` at ``g`` in closed form."""
    det, theta = rotation_angle(g)
    half = theta / 2.0
    if det > 0:
        den = math.sin(half)
        if abs(den) > 1e-6:
            return math.sin((2 * k + 1) * half) / den
        return 1.0 + 2.0 * sum(math.cos(j * theta) for j in range(1, k + 1))
    den = math.cos(half)
    if abs(den) > 1e-6:
        return math.cos((2 * k + 1) * half) / den
    return (-1) ** k * (1.0 + 2.0 * sum((-1) ** j * math.cos(j * theta) for j in range(1, k + 1)))


def markov_operator(S, weights, k: int) -> OperatorMatrix:
    mats = [np.asarray(s, dtype=float) for s in S]
    w = np.asarray(weights, dtype=float)
    if len(mats) != len(w):
        raise ValidationError("one weight per group element is needed")
    if np.any(w <= 0):
        raise ValidationError("weights must be positive")
    total = np.zeros((2 * k + 1, 2 * k + 1))
    for s, ws in zip(mats, w):
        total += ws * rep_matrix(s, k).matrix
    return OperatorMatrix(k, total, _is_symmetric(total))


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 100) -> tuple:
    """Eigenvalues (ascending) and eigenvectors of a symmetric matrix by cyclic Jacobi."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not _is_symmetric(a, 1e-9 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValidationError("jacobi_eigh needs a symmetric matrix")
    a = (a + a.T) / 2.0
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))
    mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a[mask] ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    vals = np.diag(a).copy()
    order = np.argsort(vals)
    return vals[order], v[:, order]


def spectrum(op: OperatorMatrix) -> np.ndarray:
    """Eigenvalues; real and sorted for symmetric operators, complex otherwise."""
    if op.symmetric:
        return jacobi_eigh(op.matrix)[0]
    return np.sort_complex(np.linalg.eigvals(op.matrix))


def operator_norm(op: OperatorMatrix) -> float:
    if op.symmetric:
        return float(np.max(np.abs(spectrum(op))))
    gram = op.matrix.T @ op.matrix
    return math.sqrt(max(0.0, float(jacobi_eigh(gram)[0][-1])))


# cubature homothety ---------------------------------------------------------------------


def reflection(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.eye(len(x)) - 2.0 * np.outer(x, x) / float(x @ x)


def reflections_of(ps: WeightedPointSet) -> tuple:
    """Reflections in the hyperplanes orthogonal to the points, with normalised weights."""
    if ps.dim != 3:
        raise ValidationError("Markov operators are implemented on S^2 only")
    mats = [reflection(x) for x in ps.array]
    return mats, np.asarray([float(w) for w in ps.normalized_weights()])


@dataclass
class HomothetyReport:
    degree: int
    expected_factor: float
    deviation_from_expected: float
    deviation_from_scalar: float
    tol: float

    @property
    def is_homothety(self) -> bool:
        return self.deviation_from_scalar <= self.tol

    @property
    def matches_expected(self) -> bool:
        return self.deviation_from_expected <= self.tol


def homothety_report(ps: WeightedPointSet, l: int, tol: float = 1e-9) -> HomothetyReport:
    mats, w = reflections_of(ps)
    op = markov_operator(mats, w, l).matrix
    n = 3
    factor = (n - 2) / (2 * l + n - 2)
    eye = np.eye(op.shape[0])
    scalar = float(np.trace(op)) / op.shape[0]
    return HomothetyReport(
        l,
        factor,
        float(np.max(np.abs(op - factor * eye))),
        float(np.max(np.abs(op - scalar * eye))),
        tol,
    )


def cubature_homothety_check(ps: WeightedPointSet, l: int, tol: float = 1e-9) -> bool:
    """True when the reflection operator on degree ``l`` equals ``1/(2l+1)`` times the identity."""
    return homothety_report(ps, l, tol).matches_expected


def homothety_implies_design(ps: WeightedPointSet, l: int, tol: float = 1e-9) -> StrengthReport | None:
    """If the operator on degree ``l`` is a homothety, verify strength ``>= 2l+1``; else None."""
    if not ps.is_antipodal():
        raise ValidationError("the converse needs an antipodal point set")
    if not homothety_report(ps, l, tol).is_homothety:
        return None
    report = strength_kernel(ps.to_float(), 2 * l + 2)
    if report.max_strength < 2 * l + 1:
        raise AssertionError(
            f"operator is a homothety on degree {l} but strength is {report.max_strength}"
        )
    return report


# Kesten moments -------------------------------------------------------------------------


def _exact_entries(s):
    try:
        rows = [[Fraction(x) if not isinstance(x, float) else None for x in row] for row in s]
    except (TypeError, ValueError):
        return None
    if any(v is None for row in rows for v in row):
        return None
    return rows


def _key(mat, exact: bool):
    if exact:
        return tuple(tuple(r) for r in mat)
    return tuple(np.round(np.asarray(mat, dtype=float), 9).ravel() + 0.0)


def kesten_bound(size: int) -> float:
    return 2.0 * math.sqrt(size - 1) / size


def lps_reference_bound(p: int) -> float:
    return math.sqrt(2 * p + 1) / (p + 1)


@dataclass
class KestenReport:
    size: int
    moments: list
    trace_moments: dict
    kesten_bound: float
    exact: bool

    def convergence(self, k: int) -> list:
        return [abs(a - float(b)) for a, b in zip(self.trace_moments[k], self.moments)]


def kesten_moments(S, N_max: int, k_max: int | list = 200) -> KestenReport:
    """Return-probabilities ``m_N`` of the random walk on the group generated by ``S``.

    ``m_N`` is the share of words of length ``N`` equal to the identity.  The
    words are counted by a walk over distinct group elements, with exact
    keys for rational matrices and keys rounded to 1e-9 otherwise.
    ``trace_moments[k][N]`` is ``trace(pi^(k)(M_S^N)) / (2k+1)``.
    """
    S = list(S)
    size = len(S)
    if size == 0:
        raise ValidationError("S is empty")
    if size ** N_max > WORD_CAP:
        raise BudgetExceeded(f"{size}^{N_max} words exceed the cap of {WORD_CAP}")
    exact_rows = [_exact_entries(s) for s in S]
    exact = all(r is not None for r in exact_rows)
    floats = [np.asarray(s, dtype=float) for s in S]
    for f in floats:
        _check_orthogonal(f)
    identity_f = np.eye(3)
    if exact:
        gens = exact_rows
        identity = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]

        def mul(a, b):
            return [[sum(a[i][t] * b[t][j] for t in range(3)) for j in range(3)] for i in range(3)]
    else:
        gens = floats
        identity = identity_f

        def mul(a, b):
            return a @ b

    ident_key = _key(identity, exact)
    if ident_key in {_key(g, exact) for g in gens}:
        raise ValidationError("S must not contain the identity")
    gen_keys = {_key(g, exact) for g in gens}
    inv_keys = {_key(np.asarray(g, dtype=float).T if not exact else [list(r) for r in zip(*g)], exact) for g in gens}
    if gen_keys != inv_keys:
        raise ValidationError("S must be symmetric")

    ks = list(range(1, k_max + 1)) if isinstance(k_max, int) else list(k_max)
    states = {ident_key: (identity, 1)}
    moments = []
    traces = {k: [] for k in ks}
    for N in range(N_max + 1):
        total = size**N
        moments.append(Fraction(states.get(ident_key, (None, 0))[1], total))
        chars = {k: 0.0 for k in ks}
        for mat, count in states.values():
            g = np.asarray(mat, dtype=float)
            for k in ks:
                chars[k] += count * trace_formula(g, k)
        for k in ks:
            traces[k].append(chars[k] / (total * (2 * k + 1)))
        if N == N_max:
            break
        nxt = {}
        for mat, count in states.values():
            for g in gens:
                prod = mul(mat, g)
                key = _key(prod, exact)
                if key in nxt:
                    nxt[key] = (nxt[key][0], nxt[key][1] + count)
                else:
                    nxt[key] = (prod, count)
        states = nxt
    if not exact:
        moments = [float(m) for m in moments]
    return KestenReport(size, moments, traces, kesten_bound(size), exact)


@dataclass
class SandwichReport:
    size: int
    k_max: int
    norms: list = field(default_factory=list)
    lower: float = 0.0

    @property
    def max_norm(self) -> float:
        return max(self.norms)

    @property
    def upper_ok(self) -> bool:
        return self.max_norm <= 1.0 + 1e-9

    @property
    def status(self) -> str:
        """``confirmed`` when the lower bound is attained for some ``k <= k_max``."""
        return "confirmed" if self.max_norm >= self.lower - 1e-9 else "inconclusive"


def norm_sandwich(S, k_max: int = 30, weights=None) -> SandwichReport:
    """Operator norms of the averaging operator on degrees ``1..k_max`` against ``[1/sqrt|S|, 1]``."""
    S = list(S)
    w = np.full(len(S), 1.0 / len(S)) if weights is None else np.asarray(weights, dtype=float)
    norms = [operator_norm(markov_operator(S, w, k)) for k in range(1, k_max + 1)]
    return SandwichReport(len(S), k_max, norms, 1.0 / math.sqrt(len(S)))


# text block format ----------------------------------------------------------------------------


def dumps_matrices(mats) -> str:
    """``matrices count=<m>`` header, then three rows per matrix, blank line between matrices."""
    lines = [f"matrices count={len(mats)}"]
    for g in mats:
        for row in g:
            lines.append(" ".join(str(x) if isinstance(x, (int, Fraction)) else repr(float(x)) for x in row))
        lines.append("")
    return "\n".join(lines)


def _parse_entry(tok: str):
    # decimal tokens stay floats so products are compared with a tolerance
    if any(c in tok for c in ".eE"):
        return float(tok)
    return Fraction(tok)


def loads_matrices(text: str) -> list:
    rows, count = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if count is None:
            fields = line.split()
            if fields[0] != "matrices":
                raise ValidationError(f"line {lineno}: missing 'matrices' header")
            count = int(dict(f.partition("=")[::2] for f in fields[1:]).get("count", -1))
            continue
        toks = line.split()
        if len(toks) != 3:
            raise ValidationError(f"line {lineno}: expected 3 entries")
        try:
            rows.append([_parse_entry(t) for t in toks])
        except ValueError:
            raise ValidationError(f"line {lineno}: bad numeric token") from None
    if count is None:
        raise ValidationError("empty matrix file")
    if len(rows) % 3 or (count >= 0 and len(rows) != 3 * count):
        raise ValidationError("row count does not match the declared number of matrices")
    mats = [rows[i : i + 3] for i in range(0, len(rows), 3)]
    for g in mats:
        _check_orthogonal(np.array(g, dtype=float))
    return mats
