"""Caratheodory weight reduction and kernel-potential search for designs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .pointsets import WeightedPointSet
from .polyspaces import dim_homogeneous, dim_restricted, kernel_r, monomials
from .surd import Surd
from .verify import StrengthReport, is_cubature_for, strength_kernel

__all__ = [
    "ReductionTrace",
    "caratheodory_reduce",
    "moment_matrix",
    "PotentialResult",
    "potential",
    "potential_gradient",
    "potential_minimize",
    "gradient_check",
]

FLOAT_MOMENT_TOL = 1e-10


# Caratheodory reduction ----------------------------------------------------------------


@dataclass
class ReductionTrace:
    initial_size: int
    final_size: int = 0
    dropped: list = field(default_factory=list)
    null_residuals: list = field(default_factory=list)
    moment_errors: list = field(default_factory=list)
    sizes: list = field(default_factory=list)
    min_weights: list = field(default_factory=list)
    space_dim: int = 0
    exact: bool = True
    final_weights: list = field(default_factory=list)

    def invariants_hold(self) -> bool:
        tol = 0.0 if self.exact else FLOAT_MOMENT_TOL
        sizes = [self.initial_size] + self.sizes
        return (
            all(a > b for a, b in zip(sizes, sizes[1:]))
            and all(w > 0 for w in self.min_weights)
            and all(e <= tol for e in self.moment_errors)
            and self.final_size <= self.space_dim
        )


def _space_exponents(n: int, space: str, k: int) -> list:
    if space == "F":
        return list(monomials(n, k)) + (list(monomials(n, k - 1)) if k >= 1 else [])
    if space == "P":
        return list(monomials(n, k))
    raise ValidationError("space must be 'F' or 'P'")


def _space_dim(n: int, space: str, k: int) -> int:
    return dim_restricted(n, k) if space == "F" else dim_homogeneous(n, k)


def _mono_value(point, e):
    out = 1
    for x, p in zip(point, e):
        if p:
            out = out * x**p
    return out


def moment_matrix(ps: WeightedPointSet, space: str, k: int):
    """Evaluation matrix (rows: spanning monomials of the space, columns: points)."""
    exps = _space_exponents(ps.dim, space, k)
    if ps.mode == "exact":
        return [[_mono_value(p, e) for p in ps.points] for e in exps]
    X = ps.array
    return np.stack([np.prod(X ** np.array(e), axis=1) for e in exps])


def _exact_null_vector(A: list, ncols: int):
    """Null vector from the first free column of the reduced row echelon form, or None."""
    rows = [list(r) for r in A]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Surd(1) / rows[r][c] if isinstance(rows[r][c], Surd) else 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = next((c for c in range(ncols) if c not in pivots), None)
    if free is None:
        return None
    v = [Surd(0)] * ncols
    v[free] = Surd(1)
    for row, c in enumerate(pivots):
        v[c] = -rows[row][free]
    return v


def _float_null_vector(A: np.ndarray):
    ncols = A.shape[1]
    _, s, vt = np.linalg.svd(A)
    scale = s[0] if len(s) else 1.0
    rank = int(np.sum(s > 1e-10 * scale))
    if rank >= ncols:
        return None
    return vt[-1]


def _step(weights, v, exact: bool):
    """Largest move along ``+-v`` keeping weights nonnegative; returns (alpha*v signed, index)."""
    best = None
    for i, (w, d) in enumerate(zip(weights, v)):
        if (d == 0) if exact else abs(d) <= 1e-14:
            continue
        ratio = w / d if d > 0 else w / (-d)
        if best is None or ratio < best[0]:
            best = (ratio, i, 1 if d > 0 else -1)
    ratio, index, sign = best
    return ratio * sign, index


def caratheodory_reduce(ps: WeightedPointSet, space: str, k: int, check: bool = True):
    """Sub-formula of ``ps`` with at most ``dim(space)`` points and the same integrals.

    ``space`` is ``"F"`` (all polynomials of degree at most ``k`` on the
    sphere) or ``"P"`` (homogeneous polynomials of degree ``k``).
    """
    if check and not is_cubature_for(ps, space, k):
        raise ValidationError(f"input is not a cubature formula for {space}({k})")
    exact = ps.mode == "exact"
    A_full = moment_matrix(ps, space, k)
    trace = ReductionTrace(len(ps), space_dim=_space_dim(ps.dim, space, k), exact=exact)
    alive = list(range(len(ps)))
    weights = list(ps.weights) if exact else np.array(ps.weights, dtype=float)
    if exact:
        target = [sum((row[i] * weights[i] for i in alive), Surd(0)) for row in A_full]
    else:
        target = A_full @ weights
    w_cur = [weights[i] for i in alive]
    while True:
        if exact:
            A = [[row[i] for i in alive] for row in A_full]
            v = _exact_null_vector(A, len(alive))
        else:
            A = A_full[:, alive]
            v = _float_null_vector(A)
        if v is None:
            break
        if exact:
            null_res = max((abs(float(sum((a * b for a, b in zip(row, v)), Surd(0)))) for row in A), default=0.0)
        else:
            null_res = float(np.max(np.abs(A @ v)))
        shift, index = _step(w_cur, v, exact)
        w_new = [w - shift * d for w, d in zip(w_cur, v)]
        if exact:
            zero = [i for i, w in enumerate(w_new) if w == 0]
        else:
            scale = max(abs(w) for w in w_cur)
            w_new[index] = 0.0
            zero = [i for i, w in enumerate(w_new) if w <= 1e-15 * scale]
        for i in sorted(zero, key=lambda j: (j != index, j)):
            trace.dropped.append(alive[i])
        keep = [i for i in range(len(alive)) if i not in zero]
        alive = [alive[i] for i in keep]
        w_cur = [w_new[i] for i in keep]
        if exact:
            err = max(
                abs(float(sum((row[i] * w for i, w in zip(alive, w_cur)), Surd(0)) - t))
                for row, t in zip(A_full, target)
            )
            if any(sum((row[i] * w for i, w in zip(alive, w_cur)), Surd(0)) != t for row, t in zip(A_full, target)):
                raise ArithmeticError("exact moment drift")
        else:
            got = A_full[:, alive] @ np.array(w_cur)
            err = float(np.max(np.abs(got - target)) / max(1.0, np.max(np.abs(target))))
        trace.null_residuals.append(null_res)
        trace.moment_errors.append(err)
        trace.sizes.append(len(alive))
        trace.min_weights.append(float(min(w_cur)))
    trace.final_size = len(alive)
    trace.final_weights = list(w_cur)
    if exact and all(not isinstance(w, Surd) or w.is_rational() for w in w_cur):
        w_rat = [w.to_fraction() if isinstance(w, Surd) else w for w in w_cur]
        out = WeightedPointSet([ps.points[i] for i in alive], w_rat, ps.radius2, "exact", ps.name + "_reduced")
    elif exact:
        # irrational weights: the exact values stay in the trace
        pts = np.array([[float(x) for x in ps.points[i]] for i in alive])
        out = WeightedPointSet(pts, np.array([float(w) for w in w_cur]), float(ps.radius2), "float", ps.name + "_reduced")
    else:
        out = WeightedPointSet(ps.array[alive], np.array(w_cur), ps.radius2, "float", ps.name + "_reduced")
    return out, trace


# kernel potential ------------------------------------------------------------------------


def potential(points: np.ndarray, k: int) -> float:
    """``sum_(a,b) R^(k)(<x_a|x_b>) / N^2 - 1`` for the configuration ``points`` (N x n)."""
    X = np.asarray(points, dtype=float)
    N, n = X.shape
    r = kernel_r(n, k)
    return float(np.sum(r(X @ X.T))) / N**2 - 1.0


def potential_gradient(points: np.ndarray, k: int) -> np.ndarray:
    """Gradient of :func:`potential` with respect to every coordinate (no projection)."""
    X = np.asarray(points, dtype=float)
    N, n = X.shape
    dr = kernel_r(n, k).derivative()
    return 2.0 / N**2 * dr(X @ X.T) @ X


def _project(X: np.ndarray, G: np.ndarray) -> np.ndarray:
    return G - np.sum(G * X, axis=1, keepdims=True) * X


def _normalize(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _descend(X: np.ndarray, k: int, tol: float, max_iter: int) -> tuple:
    f = potential(X, k)
    step = 1.0
    for _ in range(max_iter):
        if f < tol:
            break
        G = _project(X, potential_gradient(X, k))
        gg = float(np.sum(G * G))
        if gg < 1e-30:
            break
        while step > 1e-14:
            Y = _normalize(X - step * G)
            fy = potential(Y, k)
            if fy <= f - 1e-4 * step * gg:
                break
            step /= 2.0
        else:
            break
        X, f = Y, fy
        step *= 2.0
    return X, f


@dataclass
class PotentialResult:
    success: bool
    pointset: WeightedPointSet | None
    residual: float
    restarts_used: int
    best_points: np.ndarray
    report: StrengthReport | None = None


def potential_minimize(
    n: int,
    k: int,
    N: int,
    restarts: int = 16,
    tol: float = 1e-12,
    seed: int = 0,
    max_iter: int = 5000,
) -> PotentialResult:
    """Search for an ``N``-point spherical ``k``-design in dimension ``n``.

    Success means the potential dropped below ``tol`` and the kernel route of
    verify independently confirms strength ``k`` at tolerance ``10*tol``.
    """
    if N < 2:
        raise ValidationError("N must be at least 2")
    rng = np.random.default_rng(seed)
    best_X, best_f = None, math.inf
    for attempt in range(1, restarts + 1):
        X0 = _normalize(rng.standard_normal((N, n)))
        X, f = _descend(X0, k, tol, max_iter)
        if f < best_f:
            best_X, best_f = X, f
        if f < tol:
            ps = WeightedPointSet(X, np.full(N, 1.0 / N), 1.0, mode="float", name=f"search_{n}_{k}_{N}")
            report = strength_kernel(ps, k, tol=10 * tol)
            if report.max_strength >= k:
                return PotentialResult(True, ps, f, attempt, X, report)
    return PotentialResult(False, None, best_f, restarts, best_X)


def gradient_check(objective, gradient, point: np.ndarray, h: float = 1e-5) -> float:
    """Max relative error between ``gradient(point)`` and central differences of ``objective``."""
    X = np.asarray(point, dtype=float)
    G = np.asarray(gradient(X), dtype=float)
    num = np.zeros_like(X)
    it = np.nditer(X, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        Xp, Xm = X.copy(), X.copy()
        Xp[idx] += h
        Xm[idx] -= h
        num[idx] = (objective(Xp) - objective(Xm)) / (2 * h)
    scale = max(float(np.max(np.abs(G))), float(np.max(np.abs(num))), 1e-300)
    return float(np.max(np.abs(G - num)) / scale)
