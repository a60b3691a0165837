"""Registry of reproducible checks, one per acceptance criterion, used by ``cubkit reproduce``."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constructions as cons
from . import lattices as lat
from . import markov as mk
from . import modforms as mf
from . import polyspaces as poly
from . import search
from . import verify
from .pointsets import WeightedPointSet
from .surd import Surd

__all__ = ["ClaimResult", "CLAIMS", "run_claims"]


@dataclass
class ClaimResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    def add(self, label: str, ok: bool, info: str = "") -> bool:
        self.checks.append((label, bool(ok), info))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [(label, info) for label, ok, info in self.checks if not ok]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.number:2d}. {self.title} ({len(self.checks)} checks, {self.seconds:.1f}s)"
        for label, info in self.failures():
            text += f"\n        failed: {label} {info}".rstrip()
        return text


# fixture strengths shared by several claims
CATALOG_EXPECTATIONS = [
    # (catalog name, params, strength, tight flag or None, size or None)
    ("polygon", {"N": 3}, 2, None, None),
    ("polygon", {"N": 4}, 3, None, None),
    ("polygon", {"N": 5}, 4, None, None),
    ("polygon", {"N": 6}, 5, None, None),
    ("polygon", {"N": 7}, 6, None, None),
    ("polygon", {"N": 8}, 7, None, None),
    ("simplex", {"n": 4}, 2, True, None),
    ("cross_polytope", {"n": 5}, 3, True, None),
    ("hypercube", {"n": 4}, 3, None, None),
    ("octahedron", {}, 3, True, None),
    ("cube", {}, 3, False, None),
    ("icosahedron", {}, 5, True, None),
    ("dodecahedron", {}, 5, False, None),
    ("d4_roots", {}, 5, None, None),
    ("e8_roots", {}, 7, True, None),
    ("liouville_s3", {}, 5, None, 24),
    ("kempner_s3", {}, 7, None, 48),
    ("hurwitz_s3", {}, 9, None, 144),
    ("schur_s3", {}, 11, None, 144),
]


def _label(name, params):
    return name + "".join(f"_{v}" for v in params.values())


def claim_quadrature(res: ClaimResult):
    for l in range(1, 11):
        rule = poly.gauss_rule(l)
        worst = 0.0
        for d in range(2 * l):
            exact = 0.0 if d % 2 else 2.0 / (d + 1)
            worst = max(worst, abs(rule.integrate(lambda t: t**d) - exact))
        res.add(f"gauss l={l} exact to degree {2 * l - 1}", worst < 1e-12, f"err={worst:.1e}")
    simpson = poly.newton_cotes_rule(3)
    err = simpson.integrate(lambda t: t**4) - Fraction(1, 5)
    res.add("simpson error on t^4 equals 1/120", err == Fraction(1, 120), str(err))
    for l in range(2, 12):
        expected = l <= 8 or l == 10
        res.add(f"newton-cotes l={l} positivity", poly.newton_cotes_rule(l).positive == expected)


def claim_catalog(res: ClaimResult):
    for name, params, strength, tight, size in CATALOG_EXPECTATIONS:
        ps = cons.catalog(name, **params)
        rep = verify.strength_kernel(ps, strength + 2)
        label = _label(name, params)
        res.add(f"{label} strength exactly {strength}", rep.max_strength == strength, f"got {rep.max_strength}")
        if tight is not None:
            res.add(f"{label} tight={tight}", rep.tight == tight, f"got {rep.tight}")
        if size is not None:
            res.add(f"{label} size {size}", len(ps) == size, f"got {len(ps)}")


def claim_equivalence(res: ClaimResult):
    for name, params, strength, _, _ in CATALOG_EXPECTATIONS:
        ps = cons.catalog(name, **params)
        k = strength + 1
        a = verify.strength_kernel(ps, k).max_strength
        b = verify.strength_moments(ps, k).max_strength
        res.add(f"{_label(name, params)} kernel route == moment route", a == b, f"{a} vs {b}")
    for name in ("icosahedron", "lucas_s2"):
        c = verify.moment_identity_constant(cons.catalog(name), 2)
        res.add(f"{name} moment constant equals c_4 = 1/5", c == poly.moment_constant(3, 2) == Fraction(1, 5), str(c))


def claim_root_sets(res: ClaimResult):
    rep = verify.root_set_check(cons.icosahedron())
    target = [-1 / math.sqrt(5), 1 / math.sqrt(5)]
    ok = rep.status == "tight" and rep.matches and np.allclose(rep.observed, target, atol=1e-12, rtol=0)
    ok = ok and np.allclose(rep.expected, target, atol=1e-12, rtol=0)
    res.add("icosahedron B_X = roots of C^(2) = {+-1/sqrt5}", ok, f"{rep.observed} vs {rep.expected}")
    for n in (3, 4, 5):
        rep = verify.root_set_check(cons.simplex(n))
        ok = rep.status == "tight" and rep.matches and np.allclose(rep.observed, [-1 / n], atol=1e-12, rtol=0)
        res.add(f"simplex n={n} A_X = {{-1/n}} = root of R^(1)", ok, str(rep.observed))


def claim_e8_two_shell(res: ClaimResult):
    t0 = time.perf_counter()
    ps = lat.two_shell_cubature_e8()
    res.add("2400 points", len(ps) == 2400, str(len(ps)))
    weights = sorted(set(ps.weights))
    res.add("weights 1/1680 and 1/2520", weights == [Fraction(1, 2520), Fraction(1, 1680)], str(weights))
    rep = verify.strength_kernel(ps.to_float(), 12, tol=1e-9)
    worst = max(abs(rep.residual(d)) for d in range(1, 12))
    res.add("strength 11 with residuals < 1e-9", rep.max_strength == 11 and worst < 1e-9, f"max residual {worst:.1e}")
    r12 = abs(rep.residual(12))
    res.add("degree-12 residual > 1e-3", r12 > 1e-3, f"{r12:.3e}")
    dt = time.perf_counter() - t0
    res.add("runtime < 180 s", dt < 180, f"{dt:.1f}s")


def claim_shells(res: ClaimResult):
    E8 = lat.standard("E8")
    taus = [mf.tau(m) for m in (1, 2, 3)]
    res.add("tau(1..3) = (1, -24, 252)", taus == [1, -24, 252], str(taus))
    for m, t in zip((2, 4, 6), taus):
        s = lat.shell_design_strength(E8, m, 9).max_strength
        res.add(f"E8 shell {m} strength exactly 7 while tau != 0", s == 7 and t != 0, f"got {s}")
    for name, n, m in (("Z", 4, 2), ("Z", 7, 3)):
        s = lat.shell_design_strength(lat.standard(name, n), m, 7).max_strength
        res.add(f"Z^{n} shell {m} strength exactly 5", s == 5, f"got {s}")
    P = poly.zonal_harmonic((1, 1, 0, 0, 0, 0, 0, 0), 8)
    theta = mf.harmonic_theta(E8, P, 9)
    c1, c2, c3 = (theta.coefficient(2 * m) for m in (1, 2, 3))
    ok = c1 != 0 and Fraction(c2, c1) == -24 and Fraction(c3, c1) == 252
    res.add("degree-8 harmonic theta of E8 proportional to delta24", ok, f"{c1}, {c2}, {c3}")


def claim_scans(res: ClaimResult):
    t0 = time.perf_counter()
    for name in ("tau", "mu", "nu", "kappa8", "kappa16"):
        first = mf.nonvanishing_scan(name, 1200)
        res.add(f"{name} nonzero for m <= 1200", first is None, f"zero at {first}")
    dt = time.perf_counter() - t0
    res.add("runtime < 120 s", dt < 120, f"{dt:.1f}s")


def claim_voronoi(res: ClaimResult):
    e8 = lat.voronoi_tests(lat.standard("E8"))
    res.add("E8 strongly perfect", e8.strongly_perfect)
    res.add("E8 extreme (perfect and eutactic)", e8.extreme)
    z2 = lat.voronoi_tests(lat.standard("Z", 2))
    res.add("Z^2 eutactic", z2.eutactic)
    res.add("Z^2 not perfect", not z2.perfect)
    d4 = lat.voronoi_tests(lat.standard("D", 4))
    res.add("D4 strongly perfect", d4.strongly_perfect)


def claim_neighbors(res: ClaimResult, seed: int = 0):
    E8 = lat.standard("E8")
    rng = random.Random(seed)
    s4 = lat.shell(E8, 4).vectors
    s8 = [v for v in lat.shell(E8, 8).vectors if not all(c % 2 == 0 for c in E8.coordinates(v))]
    for z in rng.sample(s8, 3):
        N = lat.neighbor(E8, z)
        roots = len(lat.shell(N, 2))
        res.add("even neighbour (norm 8) has 240 roots", N.even and N.unimodular and roots == 240, f"{roots}")
    for z in rng.sample(s4, 3):
        N = lat.neighbor(E8, z)
        units = len(lat.shell(N, 1))
        res.add("odd neighbour (norm 4) has 16 unit vectors", N.unimodular and not N.even and units == 16, f"{units}")
    classes = lat.quadratic_classes(E8)
    res.add("135 isotropic classes", classes["isotropic"] == 135, str(dict(classes)))
    fib = lat.shell_fibers(E8, 4)
    ok = len(fib) == 135 and max(fib.values()) <= 16 and sum(fib.values()) == 135 * 16 == len(s4) == 2160
    res.add("norm-4 fibres: 135 classes, each <= 16, total 2160", ok)
    eq = sum(lat.reflection_image(E8, x).equal for x in rng.sample(s4, 20))
    res.add("s_x(M) = M^z for 20 random x of norm 4", eq == 20, f"{eq}/20")


def _random_orthogonal(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


def claim_markov(res: ClaimResult, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(100):
        g = _random_orthogonal(rng)
        if (i % 2) != (np.linalg.det(g) < 0):
            g = -g
        k = int(rng.integers(1, 9))
        worst = max(worst, abs(mk.rep_matrix(g, k).trace - mk.trace_formula(g, k)))
    res.add("trace formulas vs rep matrices, 100 random g", worst < 1e-9, f"{worst:.1e}")
    ico = cons.icosahedron()
    S, W = mk.reflections_of(ico)
    for k in (1, 2):
        op = mk.markov_operator(S, W, k).matrix
        dev = float(np.max(np.abs(op - np.eye(2 * k + 1) / (2 * k + 1))))
        res.add(f"icosahedron reflections give id/(2k+1) at k={k}", dev < 1e-9, f"{dev:.1e}")
    for name, l in (("icosahedron", 2), ("octahedron", 1), ("cube", 1)):
        ps = cons.catalog(name)
        rep = mk.homothety_implies_design(ps, l)
        ok = rep is not None and rep.max_strength >= 2 * l + 1
        res.add(f"{name}: homothety at degree {l} and strength >= {2 * l + 1}", ok)
    axes = rng.standard_normal((4, 3))
    refl = [mk.reflection(a) for a in axes]
    kr = mk.kesten_moments(refl, 6, [200])
    gap = max(kr.convergence(200))
    res.add("Kesten moments vs trace moments at k=200 within 0.02", gap < 0.02, f"{gap:.2e}")
    res.add("Kesten bound equals 2 sqrt(|S|-1)/|S|", kr.kesten_bound == 2 * math.sqrt(3) / 4)


def union_of_icosahedra() -> WeightedPointSet:
    """Icosahedron and its image under swapping the first two coordinates (24 points)."""
    ico = cons.icosahedron()
    swapped = [(p[1], p[0], p[2]) for p in ico.points]
    return WeightedPointSet(list(ico.points) + swapped, None, ico.radius2, name="two_icosahedra")


def claim_reduction(res: ClaimResult):
    ps = union_of_icosahedra()
    res.add("input has strength 2", verify.strength_kernel(ps, 2).max_strength >= 2)
    out, trace = search.caratheodory_reduce(ps, "F", 2)
    res.add("reduced to <= 9 points", len(out) <= 9 == poly.dim_restricted(3, 2), f"{len(out)}")
    res.add("positive weights", all(w > 0 for w in trace.final_weights))
    res.add("F(2) moments preserved", verify.is_cubature_for(out, "F", 2))
    res.add("trace invariants at every step", trace.invariants_hold())


def claim_search(res: ClaimResult, seed: int = 0):
    r = search.potential_minimize(2, 4, 5, seed=seed)
    ok = r.success and r.residual < 1e-12
    if ok:
        ang = np.sort(np.arctan2(r.best_points[:, 1], r.best_points[:, 0]))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
        ok = bool(np.allclose(gaps, 2 * math.pi / 5, atol=1e-5))
    res.add("pentagon recovered at (2, 4, 5)", ok, f"residual {r.residual:.1e}")
    r = search.potential_minimize(3, 4, 12, restarts=16, seed=seed)
    res.add("(3, 4, 12) succeeds within 16 restarts", r.success, f"residual {r.residual:.1e}")
    if r.success:
        rep = verify.strength_kernel(r.pointset, 4, tol=1e-11)
        res.add("success confirmed by verify", rep.max_strength >= 4)


def claim_gaussian(res: ClaimResult):
    g = cons.gaussian_lift(cons.icosahedron(), 5)
    res.add("24 points", len(g.points) == 24)
    err = g.moment_errors(5)
    res.add("Gaussian moments of degree <= 5 within 1e-10", err < 1e-10, f"{err:.1e}")
    n = 3
    r1, r2 = g.radii2
    res.add("(r1^2 + r2^2)/2 = n/2", (r1 + r2) / 2 == Surd(Fraction(n, 2)))
    res.add("(r1^4 + r2^4)/2 = n(n+2)/4", (r1 * r1 + r2 * r2) / 2 == Surd(Fraction(n * (n + 2), 4)))


def claim_waring(res: ClaimResult, seed: int = 0):
    rng = random.Random(seed)
    worst_len, bad = 0, 0
    for _ in range(1000):
        N = rng.randint(1, 10**5)
        terms = cons.waring_biquadrates(N)
        worst_len = max(worst_len, len(terms))
        fourth = all(round(t ** 0.25) ** 4 == t for t in terms)
        if sum(terms) != N or not fourth:
            bad += 1
    res.add("1000 random N: sums and fourth powers verified", bad == 0, f"{bad} bad")
    res.add("decomposition length <= 53", worst_len <= 53, f"max {worst_len}")


CLAIMS = [
    (1, "Quadrature rules", claim_quadrature),
    (2, "Catalog strengths", claim_catalog),
    (3, "Kernel and moment criteria agree", claim_equivalence),
    (4, "Tight root sets", claim_root_sets),
    (5, "E8 two-shell cubature of strength 11", claim_e8_two_shell),
    (6, "Lattice shells and modular forms", claim_shells),
    (7, "Coefficient scans up to 1200", claim_scans),
    (8, "Voronoi tests", claim_voronoi),
    (9, "Neighbour lattices of E8", claim_neighbors),
    (10, "Markov operators", claim_markov),
    (11, "Caratheodory reduction", claim_reduction),
    (12, "Potential search", claim_search),
    (13, "Gaussian lifts", claim_gaussian),
    (14, "Sums of fourth powers", claim_waring),
]


def run_claims(only=None, echo=None) -> list:
    results = []
    for number, title, fn in CLAIMS:
        if only and number not in only:
            continue
        res = ClaimResult(number, title)
        t0 = time.perf_counter()
        try:
            fn(res)
        except Exception as exc:  # a crash is a failed claim, reported as such
            res.add("raised", False, f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        results.append(res)
        if echo:
            echo(res.line())
    return results
