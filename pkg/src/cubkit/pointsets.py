"""Weighted point sets on spheres, their text format, and inner-product data."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import ValidationError
from .surd import Surd

__all__ = [
    "WeightedPointSet",
    "InnerProductProfile",
    "load",
    "save",
    "dumps",
    "loads",
    "antipodal_double",
    "pair_distribution",
    "inner_product_profile",
    "gram_two_design_test",
]

FLOAT_TOL = 1e-10


def _to_surd(x) -> Surd:
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)):
        return Surd(x)
    raise TypeError(f"exact coordinates must be int, Fraction or Surd, got {type(x).__name__}")


class WeightedPointSet:
    """Finite set of points on a sphere centred at the origin, with positive weights.

    In ``exact`` mode coordinates are :class:`Surd` values, weights are
    Fractions and ``radius2`` is an exact squared radius.  In ``float`` mode
    everything is double precision.  Construction validates that every point
    lies on the sphere, that points are distinct and that weights are positive.
    """

    def __init__(self, points, weights=None, radius2=None, mode="exact", name=""):
        if mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        self.mode = mode
        self.name = name
        if mode == "exact":
            pts = tuple(tuple(_to_surd(x) for x in p) for p in points)
            if not pts:
                raise ValidationError("empty point set")
            n = len(pts[0])
            if any(len(p) != n for p in pts):
                raise ValidationError("points have mixed dimensions")
            if weights is None:
                weights = [Fraction(1, len(pts))] * len(pts)
            wts = tuple(Fraction(w) for w in weights)
            norms = [sum((x * x for x in p), Surd(0)) for p in pts]
            r2 = norms[0] if radius2 is None else _to_surd(radius2)
            if any(v != r2 for v in norms):
                raise ValidationError("points do not lie on a common sphere")
            if len(set(pts)) != len(pts):
                raise ValidationError("duplicate points")
            self.points = pts
            self.weights = wts
            self.radius2 = r2
            self._array = None
        else:
            arr = np.array(points, dtype=float)
            if arr.ndim != 2 or len(arr) == 0:
                raise ValidationError("points must form a non-empty 2-d array")
            if weights is None:
                weights = np.full(len(arr), 1.0 / len(arr))
            wts = np.array(weights, dtype=float)
            norms = np.einsum("ij,ij->i", arr, arr)
            r2 = float(norms[0]) if radius2 is None else float(radius2)
            if not np.allclose(norms, r2, rtol=1e-9, atol=1e-12):
                raise ValidationError("points do not lie on a common sphere")
            if len(cKDTree(arr).query_pairs(FLOAT_TOL * max(1.0, math.sqrt(r2)))):
                raise ValidationError("duplicate points")
            arr.flags.writeable = False
            wts.flags.writeable = False
            self.points = arr
            self.weights = wts
            self.radius2 = r2
            self._array = arr
        if len(self.weights) != len(self.points):
            raise ValidationError("weight count differs from point count")
        if any(w <= 0 for w in self.weights):
            raise ValidationError("weights must be positive")

    # basic properties --------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_weight(self):
        if self.mode == "exact":
            return sum(self.weights, Fraction(0))
        return float(np.sum(self.weights))

    @property
    def array(self) -> np.ndarray:
        """Float coordinates, shape ``(N, n)``."""
        if self._array is None:
            arr = np.array([[float(x) for x in p] for p in self.points])
            arr.flags.writeable = False
            self._array = arr
        return self._array

    @property
    def weight_array(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def normalized_weights(self):
        tot = self.total_weight
        if self.mode == "exact":
            return tuple(w / tot for w in self.weights)
        return self.weights / tot

    def uniform_weights(self) -> bool:
        if self.mode == "exact":
            return len(set(self.weights)) == 1
        w = self.weights
        return bool(np.max(w) - np.min(w) <= 1e-12 * np.max(w))

    def to_float(self) -> "WeightedPointSet":
        if self.mode == "float":
            return self
        return WeightedPointSet(
            self.array, self.weight_array, float(self.radius2), mode="float", name=self.name
        )

    def with_weights(self, weights) -> "WeightedPointSet":
        return WeightedPointSet(self.points, weights, self.radius2, self.mode, self.name)

    def subset(self, indices) -> "WeightedPointSet":
        idx = list(indices)
        if self.mode == "exact":
            return WeightedPointSet(
                [self.points[i] for i in idx],
                [self.weights[i] for i in idx],
                self.radius2,
                "exact",
                self.name,
            )
        return WeightedPointSet(
            self.points[idx], self.weights[idx], self.radius2, "float", self.name
        )

    def is_antipodal(self) -> bool:
        """True when ``-x`` is in the set with the same weight for every ``x``."""
        if self.mode == "exact":
            lookup = dict(zip(self.points, self.weights))
            return all(lookup.get(tuple(-x for x in p)) == w for p, w in lookup.items())
        tree = cKDTree(self.points)
        dist, idx = tree.query(-self.points)
        tol = FLOAT_TOL * max(1.0, math.sqrt(self.radius2))
        return bool(np.all(dist < tol) and np.allclose(self.weights[idx], self.weights))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<WeightedPointSet{label} n={self.dim} size={len(self)} mode={self.mode}>"


# text format -----------------------------------------------------------------


def _format_exact(x) -> str:
    return str(x)


def dumps(ps: WeightedPointSet) -> str:
    if ps.mode == "exact":
        lines = [
            f"pointset n={ps.dim} radius2={ps.radius2} mode=exact "
            f"total_weight={ps.total_weight}"
        ]
        for p, w in zip(ps.points, ps.weights):
            lines.append(" ".join([str(w)] + [_format_exact(x) for x in p]))
    else:
        lines = [
            f"pointset n={ps.dim} radius2={ps.radius2!r} mode=float "
            f"total_weight={ps.total_weight!r}"
        ]
        for p, w in zip(ps.points, ps.weights):
            lines.append(" ".join([repr(float(w))] + [repr(float(x)) for x in p]))
    return "\n".join(lines) + "\n"


def _parse_exact_token(tok: str):
    if "sqrt" in tok:
        return Surd.parse(tok)
    try:
        return Fraction(tok)
    except ValueError:
        raise ValidationError(f"bad exact token {tok!r}") from None


def loads(text: str, name: str = "") -> WeightedPointSet:
    header = None
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            fields = line.split()
            if fields[0] != "pointset":
                raise ValidationError(f"line {lineno}: missing 'pointset' header")
            header = {}
            for f in fields[1:]:
                key, sep, value = f.partition("=")
                if not sep:
                    raise ValidationError(f"line {lineno}: malformed header field {f!r}")
                header[key] = value
            missing = {"n", "radius2", "mode"} - header.keys()
            if missing:
                raise ValidationError(f"header lacks {sorted(missing)}")
            continue
        records.append((lineno, line.split()))
    if header is None:
        raise ValidationError("empty point-set file")
    n = int(header["n"])
    mode = header["mode"]
    if mode not in ("exact", "float"):
        raise ValidationError(f"unknown mode {mode!r}")
    weights, points = [], []
    for lineno, toks in records:
        if len(toks) != n + 1:
            raise ValidationError(f"line {lineno}: expected {n + 1} tokens, got {len(toks)}")
        if mode == "exact":
            weights.append(_parse_exact_token(toks[0]))
            points.append([_parse_exact_token(t) for t in toks[1:]])
        else:
            try:
                vals = [float(Fraction(t)) if "/" in t else float(t) for t in toks]
            except ValueError:
                raise ValidationError(f"line {lineno}: bad numeric token") from None
            weights.append(vals[0])
            points.append(vals[1:])
    if mode == "exact":
        r2 = _parse_exact_token(header["radius2"])
    else:
        r2 = float(Fraction(header["radius2"])) if "/" in header["radius2"] else float(header["radius2"])
    ps = WeightedPointSet(points, weights, r2, mode=mode, name=name)
    if "total_weight" in header:
        declared = header["total_weight"]
        if mode == "exact":
            if Fraction(declared) != ps.total_weight:
                raise ValidationError("total_weight header disagrees with the records")
        elif abs(float(Fraction(declared)) - ps.total_weight) > 1e-9 * abs(ps.total_weight):
            raise ValidationError("total_weight header disagrees with the records")
    return ps


def load(path) -> WeightedPointSet:
    path = Path(path)
    return loads(path.read_text(), name=path.stem)


def save(ps: WeightedPointSet, path) -> None:
    Path(path).write_text(dumps(ps))


# constructions on sets ---------------------------------------------------------


def antipodal_double(ps: WeightedPointSet) -> WeightedPointSet:
    """``X`` together with ``-X``, each weight halved."""
    if ps.mode == "exact":
        pts = set(ps.points)
        neg = [tuple(-x for x in p) for p in ps.points]
        if any(q in pts for q in neg):
            raise ValidationError("set already contains an antipodal pair")
        half = [w / 2 for w in ps.weights]
        return WeightedPointSet(
            list(ps.points) + neg, half + half, ps.radius2, "exact", ps.name
        )
    dist, _ = cKDTree(ps.points).query(-ps.points)
    if np.any(dist < FLOAT_TOL * max(1.0, math.sqrt(ps.radius2))):
        raise ValidationError("set already contains an antipodal pair")
    half = ps.weights / 2
    return WeightedPointSet(
        np.vstack([ps.points, -ps.points]), np.concatenate([half, half]), ps.radius2, "float", ps.name
    )


# inner-product distribution ------------------------------------------------------


def _integer_components(points):
    """Split Surd coordinates into integer matrices per radical with a common scale."""
    radicals = sorted({d for p in points for x in p for d, _ in x.terms})
    den = 1
    for p in points:
        for x in p:
            for _, c in x.terms:
                den = den * c.denominator // math.gcd(den, c.denominator)
    n = len(points[0])
    mats = {}
    for d in radicals:
        rows = []
        for p in points:
            row = []
            for x in p:
                c = dict(x.terms).get(d, 0)
                row.append(int(c * den))
            rows.append(row)
        mats[d] = rows
    biggest = max((abs(v) for rows in mats.values() for r in rows for v in r), default=0)
    dtype = np.int64 if n * biggest * biggest * max(radicals + [1]) * len(radicals) ** 2 < 2**62 else object
    return {d: np.array(rows, dtype=dtype) for d, rows in mats.items()}, den


def pair_distribution(ps: WeightedPointSet) -> dict:
    """Map each normalized inner product ``t = <x|y>/rho^2`` to ``(mass, count)``.

    Pairs are ordered and include ``x = y``.  ``mass`` is the sum of
    ``W(x) W(y)`` with the weights scaled to total one, so the masses sum to
    one.  Exact mode returns Surd keys and Fraction masses; the computation
    groups pairs by integer Gram data, so it scales to thousands of points.
    Float mode rounds ``t`` to 1e-9 and returns float keys.
    """
    if ps.mode == "float":
        x = ps.array / math.sqrt(ps.radius2)
        w = ps.normalized_weights()
        gram = np.clip(x @ x.T, -1.0, 1.0)
        keys = np.round(gram / 1e-9).astype(np.int64)
        mass = np.outer(w, w)
        uniq, inv = np.unique(keys.ravel(), return_inverse=True)
        sums = np.bincount(inv, weights=mass.ravel())
        counts = np.bincount(inv)
        return {float(k) * 1e-9: (float(s), int(c)) for k, s, c in zip(uniq, sums, counts)}

    mats, den = _integer_components(ps.points)
    weights = ps.normalized_weights()
    classes = sorted(set(weights))
    cls_index = {w: i for i, w in enumerate(classes)}
    wcls = np.array([cls_index[w] for w in weights], dtype=np.int64)
    K = len(classes)
    # sqrt(d) * sqrt(e) = g * sqrt(m)
    products = []
    for d in mats:
        for e in mats:
            g = math.gcd(d, e)
            products.append((d, e, g, (d // g) * (e // g)))
    out_radicals = sorted({m for *_, m in products})
    # |coefficient of sqrt(m)| bounds, for packing a pair's data into one int64 key
    n = ps.dim
    peak = {d: int(np.abs(mat).max(initial=0)) for d, mat in mats.items()}
    bounds = []
    for m in out_radicals:
        bounds.append(sum(g * n * peak[d] * peak[e] for d, e, g, mm in products if mm == m))
    strides, radix = [], K * K
    for b in reversed(bounds):
        strides.append(radix)
        radix *= 2 * b + 1
    strides.reverse()
    if radix >= 2**62:
        radix = None
    N = len(ps.points)
    block = max(1, min(N, 2_000_000 // max(N, 1)))
    tally: Counter = Counter()
    for start in range(0, N, block):
        stop = min(N, start + block)
        coeff = {m: 0 for m in out_radicals}
        for d, e, g, m in products:
            coeff[m] = coeff[m] + g * (mats[d][start:stop] @ mats[e].T)
        cols = [np.asarray(coeff[m]).ravel() for m in out_radicals]
        cls_pair = (wcls[start:stop, None] * K + wcls[None, :]).ravel()
        if radix is not None:
            key = cls_pair.copy()
            for c, b, stride in zip(cols, bounds, strides):
                key += (c.astype(np.int64) + b) * stride
            uniq, counts = np.unique(key, return_counts=True)
            for k, c in zip(uniq.tolist(), counts.tolist()):
                row = []
                rest = k
                for b, stride in zip(bounds, strides):
                    row.append(rest // stride - b)
                    rest %= stride
                tally[tuple(row) + (rest,)] += c
        elif all(c.dtype != object for c in cols):
            stacked = np.column_stack(cols + [cls_pair])
            uniq, counts = np.unique(stacked, axis=0, return_counts=True)
            for row, c in zip(uniq.tolist(), counts.tolist()):
                tally[tuple(row)] += c
        else:
            for row in zip(*[c.tolist() for c in cols], cls_pair.tolist()):
                tally[tuple(int(v) for v in row)] += 1
    inv_r2 = ps.radius2.inverse()
    scale = Fraction(1, den * den)
    roots = {m: Surd.sqrt(m) for m in out_radicals}
    value_cache: dict = {}
    result: dict = {}
    for key, count in tally.items():
        gram_part, cp = key[:-1], key[-1]
        t = value_cache.get(gram_part)
        if t is None:
            ip = Surd(0)
            for m, c in zip(out_radicals, gram_part):
                if c:
                    ip = ip + roots[m] * (c * scale)
            t = ip * inv_r2
            value_cache[gram_part] = t
        mass = classes[cp // K] * classes[cp % K] * count
        prev = result.get(t)
        result[t] = (mass, count) if prev is None else (prev[0] + mass, prev[1] + count)
    return result


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


@dataclass(frozen=True)
class InnerProductProfile:
    a_set: tuple
    b_set: tuple
    antipodal: bool

    def as_floats(self):
        return [float(t) for t in self.a_set], [float(t) for t in self.b_set]


def inner_product_profile(ps: WeightedPointSet) -> InnerProductProfile:
    """Distinct normalized inner products between distinct points.

    ``a_set`` contains every value, ``b_set`` omits ``-1``.
    """
    dist = pair_distribution(ps)
    if ps.mode == "exact":
        vals = sorted((t for t in dist if t != 1), key=cmp_to_key(_cmp))
        b_vals = tuple(t for t in vals if t != -1)
    else:
        vals = [t for t in sorted(dist) if abs(t - 1.0) > 1e-8]
        b_vals = tuple(t for t in vals if abs(t + 1.0) > 1e-8)
    return InnerProductProfile(tuple(vals), b_vals, ps.is_antipodal())


def gram_two_design_test(ps: WeightedPointSet, exact_limit: int = 64) -> bool:
    """Equal-weight 2-design test through the Gram matrix.

    Checks ``Z_xx = 1``, ``Z J = 0`` and ``Z^2 = (|X|/n) Z`` for
    ``Z = Gram / rho^2``.  Exact for at most ``exact_limit`` points.
    """
    if not ps.uniform_weights():
        raise ValidationError("the Gram test needs equal weights")
    N, n = len(ps), ps.dim
    if ps.mode == "exact" and N <= exact_limit:
        inv = ps.radius2.inverse()
        Z = [[sum((a * b for a, b in zip(p, q)), Surd(0)) * inv for q in ps.points] for p in ps.points]
        if any(Z[i][i] != 1 for i in range(N)):
            return False
        if any(sum(row, Surd(0)) != 0 for row in Z):
            return False
        factor = Fraction(N, n)
        for i in range(N):
            for j in range(i, N):
                s = sum((Z[i][k] * Z[k][j] for k in range(N)), Surd(0))
                if s != Z[i][j] * factor:
                    return False
        return True
    x = ps.array / math.sqrt(float(ps.radius2))
    Z = x @ x.T
    tol = 1e-9 * N
    return bool(
        np.allclose(np.diag(Z), 1.0, atol=1e-9)
        and np.abs(Z.sum(axis=1)).max() < tol
        and np.abs(Z @ Z - (N / n) * Z).max() < tol
    )
