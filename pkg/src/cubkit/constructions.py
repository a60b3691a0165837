"""Named cubature formulas on spheres and ways to build new ones.

Exact point sets live in multi-quadratic fields (see :mod:`cubkit.surd`);
polygons whose vertex angles are not multiples of 15 degrees fall back to
float mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import roots_jacobi

from .errors import ValidationError
from .pointsets import WeightedPointSet, antipodal_double, inner_product_profile
from .polyspaces import (
    QuadratureRule,
    dim_restricted,
    gaussian_moment,
    moment_constant,
    monomials,
    multinomial,
)
from .surd import Surd
from .verify import strength_kernel

__all__ = [
    "polygon",
    "simplex",
    "cross_polytope",
    "hypercube",
    "tetrahedron",
    "octahedron",
    "cube",
    "icosahedron",
    "dodecahedron",
    "d4_roots",
    "e8_roots",
    "lucas_s2",
    "IdentityFamily",
    "liouville_family",
    "kempner_family",
    "hurwitz_family",
    "schur_family",
    "lucas_family",
    "sum_of_pairs_family",
    "identity_to_pointset",
    "catalog",
    "CATALOG",
    "interval_moment",
    "IntervalDesignResult",
    "interval_design_search",
    "product_design",
    "derived_tight4",
    "GaussianDesign",
    "gaussian_lift",
    "four_squares",
    "waring_biquadrates",
]

PHI = (1 + Surd.sqrt(5)) / 2


# polytopes -----------------------------------------------------------------------


def _cos_sin_15(multiple: int) -> tuple[Surd, Surd]:
    """Exact cosine and sine of ``multiple * 15`` degrees."""
    c15 = (Surd.sqrt(6) + Surd.sqrt(2)) / 4
    s15 = (Surd.sqrt(6) - Surd.sqrt(2)) / 4
    c, s = Surd(1), Surd(0)
    for _ in range(multiple % 24):
        c, s = c * c15 - s * s15, s * c15 + c * s15
    return c, s


def polygon(N: int) -> WeightedPointSet:
    """Regular ``N``-gon on the unit circle; exact when ``N`` divides 24."""
    if N < 2:
        raise ValidationError("a polygon needs at least two vertices")
    if 24 % N == 0:
        step = 24 // N
        pts = [_cos_sin_15(j * step) for j in range(N)]
        return WeightedPointSet(pts, radius2=1, name=f"polygon{N}")
    ang = 2 * np.pi * np.arange(N) / N
    return WeightedPointSet(
        np.column_stack([np.cos(ang), np.sin(ang)]), radius2=1.0, mode="float", name=f"polygon{N}"
    )


def _simplex_points(n: int) -> list:
    if n == 1:
        return [(Surd(1),), (Surd(-1),)]
    lower = _simplex_points(n - 1)
    shrink = Surd.sqrt(Fraction(n * n - 1, n * n))
    pts = [tuple(x * shrink for x in p) + (Surd(Fraction(-1, n)),) for p in lower]
    pts.append((Surd(0),) * (n - 1) + (Surd(1),))
    return pts


def simplex(n: int) -> WeightedPointSet:
    """Regular simplex with ``n + 1`` vertices on the unit sphere of ``R^n``."""
    if n < 1:
        raise ValidationError("dimension must be positive")
    return WeightedPointSet(_simplex_points(n), radius2=1, name=f"simplex{n}")


def cross_polytope(n: int) -> WeightedPointSet:
    pts = []
    for i in range(n):
        for s in (1, -1):
            p = [0] * n
            p[i] = s
            pts.append(p)
    return WeightedPointSet(pts, radius2=1, name=f"cross{n}")


def hypercube(n: int) -> WeightedPointSet:
    pts = list(itertools.product((1, -1), repeat=n))
    return WeightedPointSet(pts, radius2=n, name=f"hypercube{n}")


def tetrahedron() -> WeightedPointSet:
    pts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    return WeightedPointSet(pts, radius2=3, name="tetrahedron")


def octahedron() -> WeightedPointSet:
    ps = cross_polytope(3)
    ps.name = "octahedron"
    return ps


def cube() -> WeightedPointSet:
    ps = hypercube(3)
    ps.name = "cube"
    return ps


def _cyclic(p):
    return [p, (p[2], p[0], p[1]), (p[1], p[2], p[0])]


def icosahedron() -> WeightedPointSet:
    """Vertices ``(0, +-1, +-phi)`` and cyclic shifts; squared radius ``phi + 2``."""
    pts = []
    for a in (1, -1):
        for b in (1, -1):
            pts.extend(_cyclic((Surd(0), Surd(a), PHI * b)))
    return WeightedPointSet(pts, radius2=PHI + 2, name="icosahedron")


def dodecahedron() -> WeightedPointSet:
    """Vertices ``(+-1, +-1, +-1)`` and cyclic shifts of ``(0, +-1/phi, +-phi)``."""
    pts = [tuple(Surd(x) for x in p) for p in itertools.product((1, -1), repeat=3)]
    inv_phi = PHI - 1
    for a in (1, -1):
        for b in (1, -1):
            pts.extend(_cyclic((Surd(0), inv_phi * a, PHI * b)))
    return WeightedPointSet(pts, radius2=3, name="dodecahedron")


def _pm_pairs(n: int) -> list:
    pts = []
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            p = [0] * n
            p[i], p[j] = si, sj
            pts.append(tuple(p))
    return pts


def d4_roots() -> WeightedPointSet:
    return WeightedPointSet(_pm_pairs(4), radius2=2, name="d4_roots")


def e8_roots() -> WeightedPointSet:
    pts = _pm_pairs(8)
    half = Fraction(1, 2)
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            pts.append(tuple(half * s for s in signs))
    return WeightedPointSet(pts, radius2=2, name="e8_roots")


# polynomial identities ----------------------------------------------------------------


@dataclass
class IdentityFamily:
    """``sum_f coeff_f sum_{v in family f} <v|u>^(2l) = rhs * |u|^(2l)`` in ``R^n``."""

    n: int
    l: int
    rhs: Fraction
    families: list = field(default_factory=list)
    name: str = ""

    def lhs_coefficients(self) -> dict:
        out: dict = {}
        d = 2 * self.l
        for coeff, vectors in self.families:
            for v in vectors:
                for e in monomials(self.n, d):
                    term = Fraction(coeff) * multinomial(e)
                    for x, k in zip(v, e):
                        term *= Fraction(x) ** k
                    if term:
                        out[e] = out.get(e, 0) + term
        return {e: c for e, c in out.items() if c}

    def rhs_coefficients(self) -> dict:
        out = {}
        for e in monomials(self.n, 2 * self.l):
            if not any(x % 2 for x in e):
                out[e] = Fraction(self.rhs) * multinomial(tuple(x // 2 for x in e))
        return out

    def holds(self) -> bool:
        return self.lhs_coefficients() == self.rhs_coefficients()

    def validate(self) -> None:
        if not self.holds():
            raise ValidationError(f"identity {self.name or '<unnamed>'} does not hold")


def _axes(n, scale=1):
    return [tuple(scale if j == i else 0 for j in range(n)) for i in range(n)]


def _sign_patterns(n):
    """``(1, +-1, ..., +-1)``."""
    return [(1,) + s for s in itertools.product((1, -1), repeat=n - 1)]


def _pairs_pm(n):
    """``u_i +- u_j`` for ``i < j``."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        for s in (1, -1):
            v = [0] * n
            v[i], v[j] = 1, s
            out.append(tuple(v))
    return out


def _two_one_one(n):
    """``2 u_i +- u_j +- u_k`` with ``i`` outside ``j < k``."""
    out = []
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        for j, k in itertools.combinations(rest, 2):
            for sj, sk in itertools.product((1, -1), repeat=2):
                v = [0] * n
                v[i], v[j], v[k] = 2, sj, sk
                out.append(tuple(v))
    return out


def liouville_family() -> IdentityFamily:
    return IdentityFamily(4, 2, Fraction(24), [(1, _axes(4, 2)), (1, _sign_patterns(4))], "liouville")


def kempner_family() -> IdentityFamily:
    return IdentityFamily(
        4, 3, Fraction(120), [(1, _axes(4, 2)), (8, _pairs_pm(4)), (1, _sign_patterns(4))], "kempner"
    )


def hurwitz_family() -> IdentityFamily:
    return IdentityFamily(
        4,
        4,
        Fraction(5040),
        [(6, _axes(4, 2)), (60, _pairs_pm(4)), (1, _two_one_one(4)), (6, _sign_patterns(4))],
        "hurwitz",
    )


def schur_family() -> IdentityFamily:
    return IdentityFamily(
        4,
        5,
        Fraction(22680),
        [(9, _axes(4, 2)), (180, _pairs_pm(4)), (1, _two_one_one(4)), (9, _sign_patterns(4))],
        "schur",
    )


def lucas_family() -> IdentityFamily:
    return IdentityFamily(3, 2, Fraction(12), [(8, _axes(3)), (1, _sign_patterns(3))], "lucas")


def sum_of_pairs_family() -> IdentityFamily:
    """``sum_{i<j} (u_i + u_j)^4 + (u_i - u_j)^4 = 6 |u|^4`` in ``R^4``."""
    return IdentityFamily(4, 2, Fraction(6), [(1, _pairs_pm(4))], "pairs")


def identity_to_pointset(family: IdentityFamily) -> WeightedPointSet:
    """Half-set cubature for ``P^(2l)``: ``W(v/|v|) = coeff |v|^(2l) c_2l / rhs``."""
    family.validate()
    c = moment_constant(family.n, family.l)
    pts: dict = {}
    for coeff, vectors in family.families:
        for v in vectors:
            norm2 = sum(Fraction(x) ** 2 for x in v)
            inv = Surd.sqrt(1 / norm2)
            p = tuple(inv * x for x in v)
            w = Fraction(coeff) * norm2**family.l * c / family.rhs
            pts[p] = pts.get(p, 0) + w
    return WeightedPointSet(list(pts), list(pts.values()), radius2=1, name=family.name)


def lucas_s2() -> WeightedPointSet:
    """Seven-point formula for ``P^(4)(S^2)`` (axes and body diagonals)."""
    return identity_to_pointset(lucas_family())


def _doubled(family_fn, name):
    def build():
        ps = antipodal_double(identity_to_pointset(family_fn()))
        ps.name = name
        return ps

    return build


CATALOG = {
    "polygon": polygon,
    "simplex": simplex,
    "cross_polytope": cross_polytope,
    "hypercube": hypercube,
    "tetrahedron": tetrahedron,
    "octahedron": octahedron,
    "cube": cube,
    "icosahedron": icosahedron,
    "dodecahedron": dodecahedron,
    "d4_roots": d4_roots,
    "e8_roots": e8_roots,
    "lucas_s2": lucas_s2,
    "liouville_s3": _doubled(liouville_family, "liouville_s3"),
    "kempner_s3": _doubled(kempner_family, "kempner_s3"),
    "hurwitz_s3": _doubled(hurwitz_family, "hurwitz_s3"),
    "schur_s3": _doubled(schur_family, "schur_s3"),
    "e8_two_shell_s7": lambda: _e8_two_shell(),
}


def _e8_two_shell() -> WeightedPointSet:
    from .lattices import two_shell_cubature_e8

    return two_shell_cubature_e8()


def catalog(name: str, **params) -> WeightedPointSet:
    try:
        builder = CATALOG[name]
    except KeyError:
        raise ValidationError(f"unknown catalog entry {name!r}; known: {sorted(CATALOG)}") from None
    return builder(**params)


# interval designs and products ----------------------------------------------------------


def interval_moment(exponent, j: int) -> Fraction:
    """Normalized ``j``-th moment of ``(1 - t^2)^exponent`` on ``[-1, 1]``."""
    if j % 2:
        return Fraction(0)
    a = Fraction(exponent)
    out = Fraction(1)
    for i in range(j // 2):
        out *= (i + Fraction(1, 2)) / (i + a + Fraction(3, 2))
    return out


@dataclass
class IntervalDesignResult:
    found: bool
    rule: QuadratureRule | None
    residual: float
    matched_degree: int


def _newton_moments(z0: np.ndarray, targets: np.ndarray, iters: int = 200):
    z = z0.copy()
    N = len(z)
    degrees = np.arange(1, len(targets) + 1)

    def resid(v):
        return (v[:, None] ** degrees).mean(axis=0) - targets

    r = resid(z)
    for _ in range(iters):
        norm = np.linalg.norm(r)
        if norm < 1e-15:
            break
        jac = (degrees * z[:, None] ** (degrees - 1)).T / N
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-8:
            trial = z + lam * step
            if np.all(np.abs(trial) < 1):
                rt = resid(trial)
                if np.linalg.norm(rt) < norm:
                    z, r = trial, rt
                    break
            lam /= 2
        else:
            break
    return np.sort(z), float(np.linalg.norm(r))


def interval_design_search(k: int, exponent, N: int, tol: float = 1e-12) -> IntervalDesignResult:
    """``N`` equal-weight nodes on ``[-1, 1]`` matching the first ``k`` moments.

    The first attempt matches moments up to ``max(k, N)`` so that the
    answer is unique when it exists; if that fails only degrees ``1..k``
    are required.
    """
    if N < k:
        raise ValidationError("need at least k nodes")
    a = float(exponent)
    z0 = np.sort(roots_jacobi(N, a, a)[0])
    best = None
    for K in sorted({max(k, N), k}, reverse=True):
        targets = np.array([float(interval_moment(exponent, j)) for j in range(1, K + 1)])
        z, res = _newton_moments(z0, targets)
        if res < tol:
            rule = QuadratureRule(tuple(z.tolist()), (1.0 / N,) * N, (-1.0, 1.0), K)
            return IntervalDesignResult(True, rule, res, K)
        if best is None or res < best[1]:
            best = (z, res, K)
    return IntervalDesignResult(False, None, best[1], best[2])


def _check_interval_design(rule, exponent, k, tol=1e-10):
    w = np.array([float(x) for x in rule.weights])
    if np.any(w <= 0):
        raise ValidationError("interval rule has non-positive weights")
    if np.max(w) - np.min(w) > 1e-12 * np.max(w):
        raise ValidationError("interval rule must have equal weights")
    z = np.array([float(x) for x in rule.nodes])
    if np.any(np.abs(z) >= 1):
        raise ValidationError("interval nodes must lie in (-1, 1)")
    w = w / w.sum()
    for j in range(1, k + 1):
        if abs(w @ z**j - float(interval_moment(exponent, j))) > tol:
            raise ValidationError(f"interval rule misses moment {j}")


def product_design(Y: WeightedPointSet, Z: QuadratureRule, k: int) -> WeightedPointSet:
    """Points ``(sqrt(1 - z^2) y, z)`` on ``S^(n-1)`` from ``Y`` on ``S^(n-2)``.

    ``Y`` must have strength at least ``k``; ``Z`` must be an equal-weight
    rule on ``[-1, 1]`` exact to degree ``k`` for the weight
    ``(1 - t^2)^((n-3)/2)``.
    """
    n = Y.dim + 1
    if strength_kernel(Y, k).max_strength < k:
        raise ValidationError(f"Y is not a {k}-design")
    exponent = Fraction(n - 3, 2)
    _check_interval_design(Z, exponent, k)
    y = Y.array / math.sqrt(float(Y.radius2))
    wy = np.asarray(Y.normalized_weights(), dtype=float)
    pts, wts = [], []
    nz = len(Z.nodes)
    for z in Z.nodes:
        z = float(z)
        s = math.sqrt(1 - z * z)
        for yi, wi in zip(y, wy):
            pts.append(np.append(s * yi, z))
            wts.append(wi / nz)
    return WeightedPointSet(np.array(pts), np.array(wts), 1.0, mode="float", name="product")


def derived_tight4(X: WeightedPointSet, pole: int = 0) -> WeightedPointSet:
    """Tight 4-design on ``S^(n-2)`` from the neighbours of one point of a tight 5-design."""
    n = X.dim
    report = strength_kernel(X, 5)
    if report.max_strength < 5 or len(X) != n * (n + 1):
        raise ValidationError("input is not a tight 5-design")
    x = X.array / math.sqrt(float(X.radius2))
    e = x[pole]
    alpha = 1 / math.sqrt(n + 2)
    ip = x @ e
    near = np.abs(ip - alpha) < 1e-9
    if not np.any(near):
        raise ValidationError("no points at the expected inner product with the pole")
    # reflection taking e to the last axis
    target = np.zeros(n)
    target[-1] = 1.0
    v = e - target
    H = np.eye(n) if np.linalg.norm(v) < 1e-14 else np.eye(n) - 2 * np.outer(v, v) / (v @ v)
    proj = (x[near] - alpha * e) / math.sqrt(1 - alpha * alpha)
    pts = (proj @ H.T)[:, :-1]
    out = WeightedPointSet(pts, radius2=1.0, mode="float", name="derived")
    if len(out) != dim_restricted(n - 1, 2):
        raise ValidationError("neighbour count does not give a tight 4-design")
    if strength_kernel(out, 4).max_strength < 4:
        raise ValidationError("derived set is not a 4-design")
    return out


# Gaussian designs --------------------------------------------------------------------


@dataclass
class GaussianDesign:
    """Equal-weight points reproducing Gaussian moments ``pi^(-n/2) exp(-|x|^2)``."""

    points: np.ndarray
    weights: np.ndarray
    radii2: list
    strength: int

    def moment_errors(self, degree: int) -> float:
        """Largest gap over all monomials of degree at most ``degree``."""
        n = self.points.shape[1]
        worst = 0.0
        for d in range(degree + 1):
            for e in monomials(n, d):
                val = self.weights @ np.prod(self.points**np.array(e), axis=1)
                target = 0.0
                if not any(x % 2 for x in e):
                    target = 1.0
                    for x in e:
                        target *= float(gaussian_moment(x // 2))
                worst = max(worst, abs(val - target))
        return worst


def gaussian_lift(X: WeightedPointSet, t: int) -> GaussianDesign:
    """Gaussian ``t``-design from a spherical ``t``-design, ``t <= 5``.

    One sphere of squared radius ``n/2`` suffices up to ``t = 3``; for
    ``t`` in ``{4, 5}`` two spheres with squared radii ``(n -+ sqrt(2n))/2``.
    """
    if t > 5:
        raise ValidationError("lifts are available for t <= 5")
    if strength_kernel(X, t).max_strength < t:
        raise ValidationError(f"input is not a spherical {t}-design")
    n = X.dim
    x = X.array / math.sqrt(float(X.radius2))
    w = np.asarray(X.normalized_weights(), dtype=float)
    if t <= 3:
        r2 = [Surd(Fraction(n, 2))]
    else:
        root = Surd.sqrt(2 * n)
        r2 = [(n - root) / 2, (n + root) / 2]
    pts = np.vstack([math.sqrt(float(r)) * x for r in r2])
    wts = np.concatenate([w / len(r2)] * len(r2))
    return GaussianDesign(pts, wts, r2, t)


# sums of fourth powers ------------------------------------------------------------------


def four_squares(m: int) -> tuple[int, int, int, int]:
    """Some ``(a, b, c, d)`` with ``a^2 + b^2 + c^2 + d^2 = m``, largest first."""
    if m < 0:
        raise ValidationError("negative input")
    for a in range(math.isqrt(m), -1, -1):
        ra = m - a * a
        for b in range(min(a, math.isqrt(ra)), -1, -1):
            rb = ra - b * b
            for c in range(min(b, math.isqrt(rb)), -1, -1):
                rc = rb - c * c
                d = math.isqrt(rc)
                if d * d == rc and d <= c:
                    return a, b, c, d
    raise AssertionError("unreachable: every non-negative integer is a sum of four squares")


def _six_square_as_biquadrates(m: int) -> list:
    """Twelve (or fewer nonzero) fourth powers summing to ``6 m^2``."""
    n = four_squares(m)
    out = []
    for i, j in itertools.combinations(range(4), 2):
        for s in (1, -1):
            b = abs(n[i] + s * n[j])
            if b:
                out.append(b**4)
    return out


def waring_biquadrates(N: int) -> list:
    """At most 53 fourth powers summing to ``N``.

    Writes ``N = 6 (N1^2 + ... + N4^2) + r`` with ``0 <= r <= 5`` and expands
    each ``6 Ni^2`` with the twelve-term identity for ``6 |u|^4``.
    """
    if N < 1:
        raise ValidationError("N must be positive")
    q, r = divmod(N, 6)
    terms = []
    for m in four_squares(q):
        if m:
            terms.extend(_six_square_as_biquadrates(m))
    terms.extend([1] * r)
    return terms
