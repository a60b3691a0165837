"""Strength of weighted point sets, tightness, and the isometric-embedding dictionary.

Two independent routes decide the strength of a cubature formula:

* the kernel route sums ``W(x) W(y) Q^(j)(<x|y>/rho^2)`` over all ordered
  pairs; this is non-negative and vanishes exactly for degrees the formula
  integrates;
* the moment route compares the coefficients of ``sum_x W(x) <x|u>^d`` with
  those of ``c_d rho^d |u|^d`` (zero for odd ``d``).

Exact sets are decided with exact arithmetic; float sets use a tolerance.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, ValidationError
from .pointsets import WeightedPointSet, inner_product_profile, pair_distribution
from .polyspaces import (
    dim_homogeneous,
    dim_restricted,
    gegenbauer_q,
    gegenbauer_values,
    kernel_c,
    kernel_r,
    moment_constant,
    multinomial,
)
from .surd import Surd

__all__ = [
    "StrengthReport",
    "strength_kernel",
    "strength_moments",
    "kernel_residuals",
    "moment_sums",
    "moment_residual",
    "moment_identity_constant",
    "r_form_residual",
    "is_cubature_for",
    "tightness",
    "RootSetReport",
    "root_set_check",
    "weight_uniformity_of_tight",
    "embed_to_banach",
    "banach_to_cubature",
    "MOMENT_CAP",
]

DEFAULT_TOL = 1e-9
MOMENT_CAP = 200_000


@dataclass
class StrengthReport:
    max_strength: int
    residuals: list
    criterion: str
    mode: str
    k_max: int
    size: int
    dim: int
    tight: bool | None = None
    exact_zero: list = field(default_factory=list)

    @property
    def strict(self) -> bool:
        """True when the first failing degree was observed (strength is not a lower bound)."""
        return self.max_strength < self.k_max

    def residual(self, degree: int) -> float:
        for d, r in self.residuals:
            if d == degree:
                return r
        raise KeyError(degree)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        tight = {True: "yes", False: "no", None: "n/a"}[self.tight]
        lines = [f"strength={self.max_strength} tight={tight}"]
        lines.append(
            f"criterion={self.criterion} mode={self.mode} size={self.size} dim={self.dim} k_max={self.k_max}"
        )
        for d, r in self.residuals:
            lines.append(f"degree {d}: residual {r:.3e}")
        return "\n".join(lines)


# kernel route ----------------------------------------------------------------------


def kernel_residuals(ps: WeightedPointSet, k_max: int, exact: bool | None = None) -> list:
    """Residuals ``sum W W Q^(j)`` for ``j = 1..k_max``.

    Exact mode returns Surd values (zero means exactly zero); float mode
    returns floats.
    """
    if exact is None:
        exact = ps.mode == "exact"
    n = ps.dim
    if exact:
        if ps.mode != "exact":
            raise ValidationError("exact residuals need an exact point set")
        dist = pair_distribution(ps)
        out = []
        for j in range(1, k_max + 1):
            q = gegenbauer_q(n, j)
            total = Surd(0)
            for t, (mass, _) in dist.items():
                total = total + q(t) * mass
            out.append(total)
        return out
    x = ps.array / math.sqrt(float(ps.radius2))
    w = np.asarray(ps.normalized_weights(), dtype=float)
    gram = np.clip(x @ x.T, -1.0, 1.0)
    vals = gegenbauer_values(n, k_max, gram)
    return [float(w @ vals[j] @ w) for j in range(1, k_max + 1)]


def strength_kernel(ps: WeightedPointSet, k_max: int, tol: float = DEFAULT_TOL, exact: bool | None = None) -> StrengthReport:
    if exact is None:
        exact = ps.mode == "exact"
    res = kernel_residuals(ps, k_max, exact=exact)
    if exact:
        zero = [r == 0 for r in res]
        floats = [float(r) for r in res]
    else:
        floats = res
        zero = [abs(r) <= tol for r in res]
    strength = 0
    for ok in zero:
        if not ok:
            break
        strength += 1
    report = StrengthReport(
        max_strength=strength,
        residuals=list(zip(range(1, k_max + 1), floats)),
        criterion="kernel",
        mode="exact" if exact else "float",
        k_max=k_max,
        size=len(ps),
        dim=ps.dim,
        exact_zero=zero,
    )
    report.tight = tightness(ps, strength) if strength > 0 else False
    return report


def r_form_residual(ps: WeightedPointSet, k: int):
    """``sum W W R^(k)(t) - 1`` with weights normalized to total one."""
    r = kernel_r(ps.dim, k)
    if ps.mode == "exact":
        dist = pair_distribution(ps)
        total = Surd(0)
        for t, (mass, _) in dist.items():
            total = total + r(t) * mass
        return total - 1
    x = ps.array / math.sqrt(float(ps.radius2))
    w = np.asarray(ps.normalized_weights(), dtype=float)
    vals = gegenbauer_values(ps.dim, k, np.clip(x @ x.T, -1.0, 1.0))
    return float(w @ sum(vals) @ w) - 1.0


# moment route ------------------------------------------------------------------------


def _single_radical(point) -> int | None:
    rads = {d for x in point for d, _ in x.terms}
    if len(rads) > 1:
        return None
    return rads.pop() if rads else 1


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


class _MomentEngine:
    """Incremental ``sum_x W(x) x^alpha`` over all monomials of each degree."""

    def __init__(self, ps: WeightedPointSet):
        self.ps = ps
        self.n = ps.dim
        self.degree = 0
        weights = ps.normalized_weights()
        if ps.mode == "float":
            self.kind = "float"
            self.x = np.asarray(ps.array)
            self.w = np.asarray(weights, dtype=float)
            self.cols = {(): np.ones(len(ps))}
            return
        self.kind = "exact"
        groups: dict = {}
        slow = []
        for p, w in zip(ps.points, weights):
            s = _single_radical(p)
            if s is None:
                slow.append((p, w))
            else:
                groups.setdefault(s, []).append((p, w))
        self.groups = []
        for s, members in groups.items():
            den = _lcm(c.denominator for p, _ in members for x in p for _, c in x.terms)
            rows = [[int(dict(x.terms).get(s, 0) * den) for x in p] for p, _ in members]
            wden = _lcm(w.denominator for _, w in members)
            wint = [int(w * wden) for _, w in members]
            self.groups.append(
                {
                    "root": Surd.sqrt(s),
                    "den": den,
                    "wden": wden,
                    "rows": np.array(rows, dtype=object),
                    "w": np.array(wint, dtype=object),
                    "cols": {(): np.ones(len(members), dtype=object)},
                    "bound": max((abs(v) for r in rows for v in r), default=0),
                    "wmax": max(wint),
                }
            )
        self.slow = slow
        self.slow_cols = {(): [Surd(1)] * len(slow)}

    def advance(self):
        """Move every monomial table from degree ``d`` to ``d + 1``."""
        d = self.degree + 1
        if self.kind == "float":
            new = {}
            for combo in itertools.combinations_with_replacement(range(self.n), d):
                new[combo] = self.cols[combo[:-1]] * self.x[:, combo[-1]]
            self.cols = new
        else:
            for g in self.groups:
                fits = g["bound"] ** d * g["wmax"] * len(g["w"]) < 2**62
                dtype = np.int64 if fits else object
                rows = g["rows"].astype(dtype)
                new = {}
                for combo in itertools.combinations_with_replacement(range(self.n), d):
                    new[combo] = g["cols"][combo[:-1]].astype(dtype) * rows[:, combo[-1]]
                g["cols"] = new
            new_slow = {}
            for combo in itertools.combinations_with_replacement(range(self.n), d):
                prev = self.slow_cols[combo[:-1]]
                new_slow[combo] = [a * p[combo[-1]] for a, (p, _) in zip(prev, self.slow)]
            self.slow_cols = new_slow
        self.degree = d

    def sums(self) -> dict:
        """Map exponent tuple -> moment at the current degree."""
        d = self.degree
        out = {}
        if self.kind == "float":
            for combo, col in self.cols.items():
                out[_exponent(combo, self.n)] = float(self.w @ col)
            return out
        for combo in itertools.combinations_with_replacement(range(self.n), d):
            total = Surd(0)
            for g in self.groups:
                col = g["cols"][combo]
                dtype = col.dtype
                s = int((g["w"].astype(dtype) * col).sum()) if len(col) else 0
                if s:
                    total = total + g["root"] ** d * Fraction(s, g["wden"] * g["den"] ** d)
            for val, (_, w) in zip(self.slow_cols[combo], self.slow):
                total = total + val * w
            out[_exponent(combo, self.n)] = total
        return out


def _exponent(combo, n):
    e = [0] * n
    for i in combo:
        e[i] += 1
    return tuple(e)


def _check_cap(n: int, d: int) -> None:
    count = dim_homogeneous(n, d)
    if count > MOMENT_CAP:
        raise BudgetExceeded(
            f"degree {d} in dimension {n} needs {count} monomial coefficients (cap {MOMENT_CAP})"
        )


def moment_sums(ps: WeightedPointSet, d: int) -> dict:
    """``sum_x W(x) x^alpha`` for every exponent of degree ``d`` (weights normalized)."""
    _check_cap(ps.dim, d)
    eng = _MomentEngine(ps)
    for _ in range(d):
        eng.advance()
    return eng.sums()


def _moment_target(n: int, d: int, exponent, radius2):
    if d % 2 or any(e % 2 for e in exponent):
        return 0
    l = d // 2
    half = tuple(e // 2 for e in exponent)
    return moment_constant(n, l) * multinomial(half) * radius2**l


def _degree_residual(sums: dict, n: int, d: int, radius2, exact: bool):
    worst = 0.0
    all_zero = True
    scale = float(radius2) ** (d / 2)
    for e, m in sums.items():
        diff = multinomial(e) * m - _moment_target(n, d, e, radius2)
        if exact:
            if diff != 0:
                all_zero = False
                worst = max(worst, abs(float(diff)) / scale)
        else:
            worst = max(worst, abs(float(diff)) / scale)
    return all_zero, worst


def moment_residual(ps: WeightedPointSet, d: int, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether the degree-``d`` moment identity holds, with its worst coefficient gap."""
    exact = ps.mode == "exact"
    zero, worst = _degree_residual(moment_sums(ps, d), ps.dim, d, ps.radius2, exact)
    return (zero if exact else worst <= tol), worst


def strength_moments(ps: WeightedPointSet, k_max: int, tol: float = DEFAULT_TOL) -> StrengthReport:
    exact = ps.mode == "exact"
    for d in range(1, k_max + 1):
        _check_cap(ps.dim, d)
    eng = _MomentEngine(ps)
    residuals, flags = [], []
    for d in range(1, k_max + 1):
        eng.advance()
        zero, worst = _degree_residual(eng.sums(), ps.dim, d, ps.radius2, exact)
        ok = zero if exact else worst <= tol
        residuals.append((d, worst))
        flags.append(ok)
    strength = 0
    for ok in flags:
        if not ok:
            break
        strength += 1
    report = StrengthReport(
        max_strength=strength,
        residuals=residuals,
        criterion="moments",
        mode="exact" if exact else "float",
        k_max=k_max,
        size=len(ps),
        dim=ps.dim,
        exact_zero=flags,
    )
    report.tight = tightness(ps, strength) if strength > 0 else False
    return report


def moment_identity_constant(ps: WeightedPointSet, l: int):
    """The constant ``C`` in ``sum W <x|u>^(2l) = C rho^(2l) |u|^(2l)``, or None if no such C."""
    n = ps.dim
    sums = moment_sums(ps, 2 * l)
    first = (2 * l,) + (0,) * (n - 1)
    c = sums[first] / ps.radius2**l
    for e, m in sums.items():
        target = 0
        if not any(x % 2 for x in e):
            target = c * multinomial(tuple(x // 2 for x in e)) * ps.radius2**l
        diff = multinomial(e) * m - target
        if ps.mode == "exact":
            if diff != 0:
                return None
        elif abs(diff) > DEFAULT_TOL * float(ps.radius2) ** l:
            return None
    return c


def is_cubature_for(ps: WeightedPointSet, space: str, k: int, tol: float = DEFAULT_TOL) -> bool:
    """``space`` is ``"F"`` (degree at most ``k``) or ``"P"`` (homogeneous degree ``k``)."""
    if space == "F":
        return strength_kernel(ps, k, tol=tol).max_strength >= k
    if space == "P":
        return all(moment_residual(ps, d, tol)[0] for d in range(k, 0, -2))
    raise ValidationError("space must be 'F' or 'P'")


# tightness ---------------------------------------------------------------------------


def tightness(ps: WeightedPointSet, strength: int) -> bool:
    n = ps.dim
    if strength % 2 == 0:
        return len(ps) == dim_restricted(n, strength // 2)
    return len(ps) == 2 * dim_homogeneous(n, (strength - 1) // 2)


@dataclass
class RootSetReport:
    status: str
    strength: int
    tight: bool
    kernel: str
    expected: list
    observed: list
    matches: bool | None
    detail: str = ""


def root_set_check(ps: WeightedPointSet, k_max: int = 12) -> RootSetReport:
    """Compare inner products of a tight design with the roots of its kernel.

    Even strength ``2l``: every inner product is a root of ``R^(l)``.
    Odd strength ``2l+1``: every inner product other than ``-1`` is a root of
    ``C^(l)``.  Non-tight sets only get the list of observed values that are
    kernel roots.
    """
    report = strength_kernel(ps, k_max)
    s = report.max_strength
    l = s // 2
    n = ps.dim
    prof = inner_product_profile(ps)
    even = s % 2 == 0
    kern = kernel_r(n, l) if even else kernel_c(n, l)
    label = f"R^({l})" if even else f"C^({l})"
    values = prof.a_set if even else prof.b_set
    observed = sorted(float(t) for t in values)
    expected = sorted(kern.roots().tolist())
    if s == 0 or l == 0:
        return RootSetReport("skipped", s, report.tight, label, expected, observed, None,
                             "strength below 2: the kernel has no roots")
    exact = ps.mode == "exact"
    if exact:
        roots_hit = [kern(t) == 0 for t in values]
    else:
        roots_hit = [abs(kern(float(t))) < 1e-8 for t in values]
    if not report.tight:
        hits = [o for o, h in zip(observed, roots_hit) if h]
        return RootSetReport("containment", s, False, label, expected, observed, None,
                             f"{len(hits)} of {len(observed)} inner products are roots of {label}")
    same = len(values) == len(expected) and all(roots_hit)
    if same and not exact:
        same = bool(np.allclose(observed, expected, atol=1e-10))
    return RootSetReport("tight", s, True, label, expected, observed, same)


def weight_uniformity_of_tight(ps: WeightedPointSet, k_max: int = 12) -> tuple[bool, float]:
    report = strength_kernel(ps, k_max)
    if not report.tight:
        raise ValidationError("point set is not a tight cubature formula")
    w = [float(x) for x in ps.weights]
    ratio = max(w) / min(w)
    uniform = ps.uniform_weights()
    return uniform, ratio


# isometric embeddings ------------------------------------------------------------------


def embed_to_banach(ps: WeightedPointSet, l: int) -> np.ndarray:
    """Rows ``(W_k / c_2l)^(1/2l) x_k`` of an isometric map ``l_2^n -> l_2l^N``."""
    if not is_cubature_for(ps, "P", 2 * l):
        raise ValidationError(f"point set does not integrate P^({2 * l})")
    c = float(moment_constant(ps.dim, l))
    x = ps.array / math.sqrt(float(ps.radius2))
    w = np.asarray(ps.normalized_weights(), dtype=float)
    return (w / c)[:, None] ** (1.0 / (2 * l)) * x


def banach_to_cubature(matrix, l: int, tol: float = 1e-9) -> WeightedPointSet:
    """Inverse of :func:`embed_to_banach`: ``W = c_2l |y|^(2l)`` and ``x = y/|y|``."""
    y = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(y, axis=1)
    if np.any(norms <= tol):
        raise ValidationError("degenerate embedding: zero row")
    n = y.shape[1]
    c = float(moment_constant(n, l))
    x = y / norms[:, None]
    w = c * norms ** (2 * l)
    # rows that are positive multiples of each other merge into one point
    merged_pts: list = []
    merged_w: list = []
    for xi, wi in zip(x, w):
        for j, p in enumerate(merged_pts):
            if np.linalg.norm(p - xi) < 1e-10:
                merged_w[j] += wi
                break
        else:
            merged_pts.append(xi)
            merged_w.append(wi)
    ps = WeightedPointSet(np.array(merged_pts), np.array(merged_w), 1.0, mode="float")
    total = float(np.sum(merged_w))
    if abs(total - 1.0) > tol:
        raise ValidationError(f"not isometric: total weight {total}")
    ok, worst = moment_residual(ps, 2 * l, tol)
    if not ok:
        raise ValidationError(f"not isometric: degree {2 * l} moment gap {worst:.3e}")
    return ps
