import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, special

from cubkit.polyspaces import (
    Poly,
    dim_harmonic,
    dim_homogeneous,
    dim_restricted,
    gauss_rule,
    gaussian_moment,
    gegenbauer_q,
    gegenbauer_values,
    kernel_c,
    kernel_r,
    moment_constant,
    monomial_sphere_integral,
    monomials,
    multinomial,
    newton_cotes_rule,
    zonal_harmonic,
)


def gegenbauer_oracle(n, k, t):
    """Reproducing-kernel normalisation of the classical Gegenbauer polynomial."""
    if k == 0:
        return np.ones_like(t)
    if n == 2:
        return 2 * np.cos(k * np.arccos(t))
    lam = (n - 2) / 2
    return (n + 2 * k - 2) / (n - 2) * special.eval_gegenbauer(k, lam, t)


def sphere_integral_oracle(n, exps):
    """Gamma-function formula for the normalised sphere integral of a monomial."""
    if any(e % 2 for e in exps):
        return 0.0
    num = math.gamma(n / 2) * math.prod(math.gamma((e + 1) / 2) for e in exps)
    return num / (math.pi ** (len(exps) / 2) * math.gamma((sum(exps) + n) / 2))


def random_sphere(rng, n, size):
    x = rng.standard_normal((size, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
@pytest.mark.parametrize("k", range(0, 9))
def test_gegenbauer_against_scipy(n, k):
    t = np.linspace(-1, 1, 41)
    assert_allclose(gegenbauer_q(n, k)(t), gegenbauer_oracle(n, k, t), atol=1e-9, rtol=1e-10)


def test_gegenbauer_frozen_values():
    assert gegenbauer_q(3, 2).coeffs == (Fraction(-5, 2), 0, Fraction(15, 2))
    assert gegenbauer_q(2, 3).coeffs == (0, -6, 0, 8)
    assert gegenbauer_q(4, 1).coeffs == (0, 4)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_gegenbauer_at_one_is_harmonic_dimension(n):
    for k in range(8):
        assert gegenbauer_q(n, k)(Fraction(1)) == dim_harmonic(n, k)


def test_gegenbauer_values_matches_polynomials():
    t = np.linspace(-1, 1, 11)
    vals = gegenbauer_values(5, 6, t)
    for k in range(7):
        assert_allclose(vals[k], gegenbauer_q(5, k)(t), atol=1e-12)


@pytest.mark.parametrize("n,k", [(2, 3), (3, 4), (4, 3), (5, 2)])
def test_reproducing_property(n, k):
    # average of Q(<a|x>) Q(<b|x>) over the sphere equals Q(<a|b>) for unit a, b
    rng = np.random.default_rng(n * 10 + k)
    a, b = (tuple(Fraction(int(v)) for v in rng.integers(-5, 6, n)) for _ in range(2))
    a2, b2 = sum(x * x for x in a), sum(x * x for x in b)
    avg = (zonal_harmonic(a, k) * zonal_harmonic(b, k)).sphere_average()
    t = float(sum(x * y for x, y in zip(a, b))) / math.sqrt(float(a2 * b2))
    expected = math.sqrt(float(a2 * b2)) ** k * float(gegenbauer_q(n, k)(t))
    assert math.isclose(float(avg), expected, rel_tol=1e-10, abs_tol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_zonal_harmonic_is_harmonic(n, k):
    axis = tuple(range(1, n + 1))
    P = zonal_harmonic(axis, k)
    assert P.is_homogeneous() and P.degree == k
    assert not P.laplacian()


def laplacian_kernel_dimension(n, k):
    monos = list(monomials(n, k))
    lower = {e: i for i, e in enumerate(monomials(n, k - 2))} if k >= 2 else {}
    mat = np.zeros((max(1, len(lower)), len(monos)))
    for j, e in enumerate(monos):
        for e2, c in Poly(n, {e: 1}).laplacian().terms.items():
            mat[lower[e2], j] = float(c)
    return len(monos) - np.linalg.matrix_rank(mat)


def restriction_rank(n, k, rng):
    monos = list(monomials(n, k)) + (list(monomials(n, k - 1)) if k else [])
    pts = random_sphere(rng, n, 3 * len(monos))
    mat = np.stack([np.prod(pts ** np.array(e), axis=1) for e in monos], axis=1)
    return np.linalg.matrix_rank(mat, tol=1e-8)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("k", range(0, 6))
def test_dimension_formulas_against_linear_algebra(n, k):
    rng = np.random.default_rng(7)
    assert dim_homogeneous(n, k) == len(list(monomials(n, k)))
    assert dim_harmonic(n, k) == laplacian_kernel_dimension(n, k)
    assert dim_restricted(n, k) == restriction_rank(n, k, rng)


def test_dimension_frozen_values():
    assert [dim_harmonic(3, k) for k in range(5)] == [1, 3, 5, 7, 9]
    assert dim_restricted(3, 2) == 9
    assert dim_homogeneous(4, 4) == 35
    assert dim_restricted(8, 3) == 120 + 36


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_kernel_sums(n):
    for k in range(2, 7):
        assert kernel_c(n, k) == gegenbauer_q(n, k) + kernel_c(n, k - 2)
        assert kernel_r(n, k) == kernel_c(n, k) + kernel_c(n, k - 1)
        assert kernel_c(n, k)(Fraction(1)) == dim_homogeneous(n, k)
        assert kernel_r(n, k)(Fraction(1)) == dim_restricted(n, k)


@pytest.mark.parametrize("n", [2, 3, 4, 8])
@pytest.mark.parametrize("l", [0, 1, 2, 3, 4])
def test_moment_constant_against_gamma(n, l):
    c = moment_constant(n, l)
    assert math.isclose(float(c), sphere_integral_oracle(n, (2 * l,) + (0,) * (n - 1)), rel_tol=1e-12)


def test_moment_constant_frozen():
    assert moment_constant(3, 2) == Fraction(1, 5)
    assert moment_constant(4, 2) == Fraction(1, 8)
    assert moment_constant(5, 0) == 1


def test_sphere_integrals_monte_carlo():
    rng = np.random.default_rng(0)
    pts = random_sphere(rng, 3, 400_000)
    for e in [(2, 0, 0), (2, 2, 0), (4, 0, 0), (2, 2, 2)]:
        mc = np.mean(np.prod(pts ** np.array(e), axis=1))
        assert abs(mc - float(monomial_sphere_integral(3, e))) < 5e-3


@given(st.lists(st.integers(0, 6), min_size=2, max_size=5))
def test_sphere_integrals_against_gamma(exps):
    n = len(exps)
    assert math.isclose(float(monomial_sphere_integral(n, exps)), sphere_integral_oracle(n, exps), rel_tol=1e-12, abs_tol=0)


@pytest.mark.parametrize("l", range(0, 6))
def test_gaussian_moment_numeric(l):
    val, _ = integrate.quad(lambda x: x ** (2 * l) * math.exp(-x * x) / math.sqrt(math.pi), -np.inf, np.inf)
    assert math.isclose(float(gaussian_moment(l)), val, rel_tol=1e-10)


@pytest.mark.parametrize("l", range(1, 11))
def test_gauss_rule_matches_numpy_and_is_exact(l):
    rule = gauss_rule(l)
    x, w = np.polynomial.legendre.leggauss(l)
    assert_allclose(rule.nodes, x, atol=1e-14)
    assert_allclose(rule.weights, w, atol=1e-14)
    for d in range(2 * l):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert abs(rule.integrate(lambda t: t**d) - exact) < 1e-12
    assert rule.positive and rule.exact_degree == 2 * l - 1


def test_gauss_rule_on_other_interval():
    rule = gauss_rule(3, 0.0, 2.0)
    assert math.isclose(rule.integrate(lambda t: t**5), 2**6 / 6, rel_tol=1e-13)


def test_simpson_error_is_one_over_120():
    simpson = newton_cotes_rule(3)
    assert simpson.weights == (Fraction(1, 6), Fraction(2, 3), Fraction(1, 6))
    assert simpson.integrate(lambda t: t**4) - Fraction(1, 5) == Fraction(1, 120)
    # exact through degree 3
    for d in range(4):
        assert simpson.integrate(lambda t: t**d) == Fraction(1, d + 1)


def test_newton_cotes_positivity_pattern():
    flags = [newton_cotes_rule(l).positive for l in range(2, 12)]
    assert flags == [l <= 8 or l == 10 for l in range(2, 12)]


@pytest.mark.parametrize("l", range(2, 9))
def test_newton_cotes_exactness(l):
    rule = newton_cotes_rule(l)
    top = l - 1 if l % 2 == 0 else l
    for d in range(top + 1):
        assert rule.integrate(lambda t: Fraction(t) ** d) == Fraction(1, d + 1)


coeffs = st.integers(-3, 3)


@given(st.lists(coeffs, min_size=6, max_size=6), st.lists(coeffs, min_size=6, max_size=6),
       st.tuples(coeffs, coeffs, coeffs))
def test_poly_arithmetic_matches_evaluation(c1, c2, point):
    monos = list(itertools.chain(monomials(3, 0), monomials(3, 1), [(2, 0, 0), (1, 1, 0)]))
    p = Poly(3, {m: c for m, c in zip(monos, c1) if c})
    q = Poly(3, {m: c for m, c in zip(monos, c2) if c})
    x = tuple(Fraction(v) for v in point)
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)


def test_laplacian_of_norm_power():
    # Laplacian of |x|^(2m) in R^n is 2m(n + 2m - 2)|x|^(2m-2)
    for n in (2, 3, 5):
        r2 = Poly.norm_squared(n)
        for m in (1, 2, 3):
            assert (r2**m).laplacian() == (r2 ** (m - 1)) * (2 * m * (n + 2 * m - 2))


def test_multinomial():
    assert multinomial((2, 1, 1)) == 12
    assert multinomial((0, 0)) == 1
